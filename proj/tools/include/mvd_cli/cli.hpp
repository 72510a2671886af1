#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mvd::cli {

/// Runs the command line `args` (without the program name). Returns the
/// process exit code: 0 success, 1 usage error, 2 data or validation error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Formats an error value with six significant digits ("0.000000" for 0).
std::string format_mse(double eps);

}  // namespace mvd::cli
