#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace accomp::cli {

enum ExitCode : int {
  kOk = 0,
  kBadArgs = 2,
  kIoFailure = 3,
  kNumericFailure = 4,
};

/// Runs one command line (without the program name). Diagnostics go to
/// `err` as a single line; reports and timing go to `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Sample quantile with linear interpolation between order statistics.
double quantile(std::vector<double> values, double q);

}  // namespace accomp::cli
