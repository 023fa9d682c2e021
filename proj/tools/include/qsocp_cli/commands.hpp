#pragma once

#include <iosfwd>

namespace qsocp::cli {

inline constexpr int kExitOptimal = 0;
inline constexpr int kExitPrimalInfeasible = 2;
inline constexpr int kExitDualInfeasible = 3;
inline constexpr int kExitMaxIterations = 4;
inline constexpr int kExitNumericalError = 5;
inline constexpr int kExitUsage = 64;

/// Entry point of the qsocp tool. Subcommands: solve, generate, analyze,
/// parsing-info, bench, profiles. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qsocp::cli
