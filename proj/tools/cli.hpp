#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sfcd::cli {

/// Exit statuses of the `sfcd` tool.
enum ExitCode : int {
  kOk = 0,
  kInputError = 2,
  kNumericalError = 3,
};

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sfcd::cli
