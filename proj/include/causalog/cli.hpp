#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace causalog {

/// Process exit codes of the `causalog` tool.
enum ExitCode : int {
    kExitOk = 0,
    kExitInputError = 1,  // parse, validation or I/O error
    kExitBudget = 2,      // a budget was hit; partial results printed
    kExitNotModel = 3,
    kExitDisagree = 4,
};

/// Runs the command line `args` (without the program name), writing to `out` / `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace causalog
