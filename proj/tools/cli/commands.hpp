#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace wcons::cli {

enum ExitStatus : int { kExitOk = 0, kExitValidation = 1, kExitSolver = 2 };

/// Runs one `wcons` invocation. `args` excludes the program name.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace wcons::cli
