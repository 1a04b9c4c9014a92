#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace kfwer {

// Exit codes of the command-line front end.
enum ExitCode : int { kExitOk = 0, kExitVerifyFailed = 1, kExitUsage = 2, kExitNumerical = 3 };

// Runs the CLI on `args` (without the program name).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace kfwer
