#pragma once

#include <iosfwd>

namespace epimon::cli {

enum ExitCode { kOk = 0, kUsage = 1, kData = 2, kNumerical = 3 };

/// Entry point of the `epimon` command; diagnostics go to `err`, the list of
/// written artifacts to `out`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace epimon::cli
