#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace abep::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kCheckFailed = 1;
inline constexpr int kUsageError = 2;
inline constexpr int kRuntimeError = 3;

// Runs one command line (without the program name). CSV goes to `out` unless
// --out is given; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace abep::cli
