#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sweptvol::cli {

enum ExitCode : int
{
    ok = 0,
    input_error = 2,
    numeric_failure = 3,
};

/*!
 * Run one command line (without the program name). Results go to `out` as
 * JSON lines, diagnostics to `err`.
 */
int run(std::vector<std::string> const& args, std::ostream& out, std::ostream& err);

//! Lower-case hex SHA-256 of a file's bytes.
std::string sha256_file(std::string const& path);

}  // namespace sweptvol::cli
