#pragma once

#include <iosfwd>

namespace indsum::cli {

enum ExitCode : int { kOk = 0, kConfigError = 2, kNumericalError = 3, kValidationFailure = 4 };

// Entry point shared by the executable and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace indsum::cli
