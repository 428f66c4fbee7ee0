#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qnd::cli {

/// Exit codes of the qnd_sim tool.
enum ExitCode : int {
  kSuccess = 0,
  kValidationFailure = 1,
  kUsageError = 2,
  kDomainError = 3,
};

/// Runs the tool with `args` (args[0] is the program name). Diagnostics go
/// to `err`, progress lines to `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Shortest text that reads back as exactly `v` with at most 17 significant
/// digits, independent of the C locale.
std::string format_number(double v);

}  // namespace qnd::cli
