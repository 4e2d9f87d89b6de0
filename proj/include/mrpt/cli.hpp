#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mrpt {

/// Exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitDataError = 1,
  kExitUsage = 2,
};

/// Runs the `mrpt` command line. `args` excludes the program name.
/// Diagnostics go to `err`, informational output to `out`.
int cli_main(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err);

}  // namespace mrpt
