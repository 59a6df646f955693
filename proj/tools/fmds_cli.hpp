#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace fmds::cli {

enum ExitCode : int { kOk = 0, kUsage = 2, kNumeric = 3, kIo = 4 };

/// Runs one command line (args excludes the program name) and returns the
/// process exit code. Diagnostics go to err, help and summaries to out.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fmds::cli
