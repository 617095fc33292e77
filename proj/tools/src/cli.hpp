#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace chromalign::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitValidation = 1,
  kExitSolver = 2,
  kExitIo = 3,
};

/// Parses `args` (args[0] is the program name), runs the selected
/// subcommand and maps failures to exit codes: 1 validation or usage,
/// 2 solver failure, 3 I/O.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace chromalign::cli
