#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pdthresh::cli {

enum ExitCode : int { kOk = 0, kComputationFailure = 1, kUsageError = 2 };

/// Runs one command; `args` excludes the program name. Errors are written to
/// `err` as a single line "error: <category>: <message>".
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pdthresh::cli
