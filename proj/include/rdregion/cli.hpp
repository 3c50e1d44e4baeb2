#pragma once

#include <iosfwd>
#include <string>

namespace rdregion {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitThreshold = 1;
inline constexpr int kExitInput = 2;

// The `rdregion` command line; `out` receives reports, `err` diagnostics.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// %.6g, with -0 printed as 0.
std::string format_number(double v);

}  // namespace rdregion
