#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace extell::cli {

enum ExitCode { kOk = 0, kUsage = 1, kInfeasible = 2, kViolations = 3 };

/// Runs the command line `args` (without the program name), writing the
/// result JSON to `out` and diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace extell::cli
