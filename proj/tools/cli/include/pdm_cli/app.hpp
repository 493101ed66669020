#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace pdm::cli {

/// Exit codes; stable across versions.
enum ExitCode : int {
    kPass = 0,
    kVerificationFailed = 1,
    kConfigError = 2,
    kConstructionError = 3,
};

/// Runs the command line `args` (without the program name). Files named by
/// --out are written directly; everything else goes to `out` and `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pdm::cli
