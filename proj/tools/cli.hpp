#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace mrct::cli {

/// Exit codes of the mrct tool.
inline constexpr int kOk = 0;
inline constexpr int kDomainError = 1;
inline constexpr int kUsageError = 2;

/// Runs one invocation. `args` excludes the program name. Machine output goes
/// to `out` (or a --out file), diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mrct::cli
