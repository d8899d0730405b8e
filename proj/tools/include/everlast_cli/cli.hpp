#pragma once

#include <iosfwd>

namespace everlast::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitAssertion = 1;
inline constexpr int kExitUsage = 2;

/// Entry point of the `everlast` tool. Returns the process exit code:
/// 0 when every embedded assertion held, 1 on an assertion failure, 2 on a
/// usage or configuration error.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace everlast::cli
