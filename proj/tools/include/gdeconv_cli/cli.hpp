#pragma once

#include <iosfwd>

namespace gdeconv::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;      // bad flags, unreadable or malformed data
inline constexpr int kExitNumerical = 3;  // solver failure, replay mismatch

// Entry point shared by the executable and the tests. argv[0] is the program
// name; argv[1] the subcommand.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace gdeconv::cli
