#pragma once

#include <ostream>

namespace sepbody::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 2;
inline constexpr int kExitInconclusive = 3;
inline constexpr int kExitUsage = 64;
inline constexpr int kExitSoftware = 70;

/// Entry point of the command-line tool. Primary output goes to `out` (or the
/// --out file), diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sepbody::cli
