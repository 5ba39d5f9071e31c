#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace adjstab::cli {

/// Runs the command line `args` (without the program name). Records go to
/// `out` unless --output is given; failures print one line
/// "error: <ErrorClass>: <message>" to `err`. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace adjstab::cli
