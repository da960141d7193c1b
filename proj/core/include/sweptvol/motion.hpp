#pragma once

#include <array>
#include <utility>
#include <vector>

#include "representation.hpp"
#include "types.hpp"

namespace sweptvol {

//---------------------------------------------------------------------------//
/*!
 * Piecewise polynomial of degree <= 5 on [knots.front(), knots.back()].
 *
 * Segment k covers [knots[k], knots[k+1]] and stores monomial coefficients
 * in (t - knots[k]). Values must agree at interior knots within 1e-9.
 * A single zero-width segment is allowed to describe a degenerate domain.
 */
class PiecewisePoly
{
  public:
    static constexpr int max_degree = 5;

    PiecewisePoly() = default;
    PiecewisePoly(std::vector<double> knots, std::vector<std::vector<double>> coeffs);

    //! Polynomial equal to `value` everywhere on [a, b].
    static PiecewisePoly constant(double a, double b, double value);
    //! Polynomial going linearly from v0 at a to v1 at b.
    static PiecewisePoly linear(double a, double b, double v0, double v1);

    double lower() const { return knots_.front(); }
    double upper() const { return knots_.back(); }
    std::size_t segments() const { return coeffs_.size(); }
    std::vector<double> const& knots() const { return knots_; }
    std::vector<std::vector<double>> const& coeffs() const { return coeffs_; }

    double operator()(double t) const;
    PiecewisePoly derivative() const;

    //! Upper bound on |p(t)| over [t0, t1] by coefficient-norm bounding.
    double abs_bound(double t0, double t1) const;
    //! Exact (to root precision) minimum and maximum over [t0, t1].
    std::pair<double, double> range(double t0, double t1) const;

  private:
    std::size_t segment_of(double t) const;

    std::vector<double> knots_;
    std::vector<std::vector<double>> coeffs_;
};

//! Real roots of a polynomial (monomial coefficients) inside [lo, hi].
std::vector<double> polynomial_roots(std::vector<double> const& coeffs, double lo, double hi);

//---------------------------------------------------------------------------//
//! Proper rigid map x -> R x + translation.
struct Isometry
{
    Mat3 rotation = Mat3::Identity();
    Vec3 translation = Vec3::Zero();

    Vec3 apply(Vec3 const& p) const { return rotation * p + translation; }
    Vec3 apply_inverse(Vec3 const& p) const
    {
        return rotation.transpose() * (p - translation);
    }
};

//! R_x(alpha) * R_y(beta) * R_z(gamma), with R_y(b) = [[c,0,-s],[0,1,0],[s,0,c]].
Mat3 euler_rotation(double alpha, double beta, double gamma);

//---------------------------------------------------------------------------//
/*!
 * Time-dependent rigid transformation T(t) = Translation_v(t) o Rotation(t)
 * on [a, b], with piecewise-polynomial translation and Euler angles.
 */
class RigidMotion
{
  public:
    RigidMotion() = default;
    RigidMotion(double a, double b, std::array<PiecewisePoly, 3> translation,
                std::array<PiecewisePoly, 3> angles);

    //! Constant T(t) = g on [a, b].
    static RigidMotion constant(double a, double b, Vec3 const& translation,
                                Vec3 const& angles = Vec3::Zero());
    static RigidMotion identity(double a = 0.0, double b = 1.0)
    {
        return constant(a, b, Vec3::Zero());
    }

    double lower() const { return a_; }
    double upper() const { return b_; }
    std::array<PiecewisePoly, 3> const& translation() const { return v_; }
    std::array<PiecewisePoly, 3> const& angles() const { return angles_; }

    Isometry at(double t) const;
    Vec3 apply(double t, Vec3 const& p) const { return at(t).apply(p); }
    Vec3 inverse_apply(double t, Vec3 const& p) const { return at(t).apply_inverse(p); }

    /*!
     * Upper bound on |d/dt T(t) P| over [t0, t1] for any |P| <= r:
     * |v'| + r (|alpha'| + |beta'| + |gamma'|), each term bounded from the
     * derivative coefficients.
     */
    double speed_bound(double t0, double t1, double r) const;

  private:
    void check_time(double t) const;

    double a_ = 0.0, b_ = 1.0;
    std::array<PiecewisePoly, 3> v_;
    std::array<PiecewisePoly, 3> angles_;
    std::array<PiecewisePoly, 3> dv_;
    std::array<PiecewisePoly, 3> dangles_;
};

Isometry eval_motion(RigidMotion const& motion, double t);
Vec3 inverse_apply(RigidMotion const& motion, double t, Vec3 const& p);
double motion_speed_bound(RigidMotion const& motion, double t0, double t1, double r);

//! Three-ball capsule and the half-turn-plus-translation motion on [0, 1].
std::pair<LocalImplicitRep, RigidMotion> capsule_example();

}  // namespace sweptvol
