#pragma once

#include <iosfwd>

namespace purify::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitInvalidArguments = 2,
  kExitInfeasible = 3,
  kExitValidationFailure = 4,
};

/// Parses argv and runs one of: ladder, asymptotic-sweep, finite-sweep,
/// validate. Results go to --out (stdout by default), diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace purify::cli
