#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace seqnet {

/// Exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitInvalid = 1, kExitToleranceFailure = 2 };

/// Entry point of `seqnet_cli`; args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace seqnet
