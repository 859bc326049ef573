#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace mtginf {

/// Exit codes of the command-line front end.
enum ExitCode : int {
    exit_ok = 0,
    exit_usage = 2,
    exit_numeric = 3,
    exit_io = 4,
};

/// Runs one invocation. `args` excludes the program name. Results go to `out`
/// (or to --out PATH), diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mtginf
