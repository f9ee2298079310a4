#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace jetext::cli {

/// Process exit codes. These are stable contracts.
enum ExitCode : int {
  kOk = 0,
  kFailure = 1,            // unexpected runtime error
  kInvalidInput = 2,       // parse/validation failure, bad configuration
  kInfeasibleConvex = 3,   // convex mode on a field without a convex extension
  kDimensionTooLarge = 4,  // grid output requested for n > 2
  kCertificationFailed = 5,
};

/// Runs one command line (args[0] is the program name). Normal output goes
/// to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace jetext::cli
