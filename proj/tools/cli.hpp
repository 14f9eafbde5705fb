#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace fusion::cli {

/// Runs the command line `args` (without the program name). Records go to
/// `out`, diagnostics to `err`. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fusion::cli
