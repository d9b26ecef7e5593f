#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace intensim::cli {

/// Process exit codes.
enum ExitCode : int {
    kOk = 0,
    kIoError = 1,
    kDimensionMismatch = 2,
    kConfigError = 3,
    kDegenerateInput = 4,
    kInternalError = 5,
};

/// Runs the command line front end. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace intensim::cli
