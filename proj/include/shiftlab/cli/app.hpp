#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace shiftlab::cli {

enum ExitCode : int { Success = 0, Internal = 1, BadInput = 2, Precondition = 3 };

/// Runs one shiftlab command line (args exclude the program name). Reports go to out, diagnostics to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace shiftlab::cli
