#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace conncoord::app {

enum ExitCode : int { kPass = 0, kFail = 1, kUsage = 2 };

/// Runs one command line (without the program name); returns the exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace conncoord::app
