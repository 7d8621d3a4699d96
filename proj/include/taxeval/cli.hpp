#pragma once

#include <iosfwd>
#include <span>
#include <string>

namespace taxeval {

// Runs the `taxeval` command line. args[0] is the program name. Returns the
// exit code: 0 success, 1 input error, 2 internal error.
int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace taxeval
