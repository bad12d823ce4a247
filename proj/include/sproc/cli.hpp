#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sproc {

/// Exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitUndetermined = 2, kExitNumerical = 3 };

/// Runs one command; args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sproc
