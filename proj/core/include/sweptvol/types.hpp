#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace sweptvol {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

//! Caller handed data that violates a documented precondition.
class InvalidInput : public std::invalid_argument
{
  public:
    using std::invalid_argument::invalid_argument;
};

//! A time (or other parameter) fell outside the domain of a function.
class DomainError : public std::domain_error
{
  public:
    using std::domain_error::domain_error;
};

//! A root-finder was given an interval without a sign change.
class BracketError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

//! Text input could not be parsed; carries the 1-based line number.
class ParseError : public std::runtime_error
{
  public:
    ParseError(std::size_t line, std::string const& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what)
        , line_(line)
    {
    }

    std::size_t line() const noexcept { return line_; }

  private:
    std::size_t line_;
};

}  // namespace sweptvol
