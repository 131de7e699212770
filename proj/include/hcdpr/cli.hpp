// Command-line front end. Exit codes: 0 ok, 2 usage, 3 divergence,
// 4 workspace or infeasible tension set.
#pragma once

#include <ostream>

namespace hcdpr {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitDivergence = 3;
inline constexpr int kExitWorkspace = 4;

inline constexpr const char* kToolVersion = "hcdpr 1.0.0";

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hcdpr
