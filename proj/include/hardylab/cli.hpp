#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hardylab::cli {

/// Exit codes: 0 success, 1 usage error, 2 mathematical failure (typed
/// MathError, a failed verification, or image-test violations).
enum ExitCode : int { kOk = 0, kUsage = 1, kMath = 2 };

/// Runs one subcommand. `args` excludes the program name. Reports go to the
/// --out file when given, otherwise to `out`; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Expands `--config FILE` (JSON {"command": ..., "args": {...}}) into the
/// equivalent argument list. Other argument lists are returned unchanged.
std::vector<std::string> expand_config(const std::vector<std::string>& args);

}  // namespace hardylab::cli
