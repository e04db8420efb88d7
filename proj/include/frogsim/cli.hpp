#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace frog {

inline constexpr int kExitOk = 0;
inline constexpr int kExitIo = 1;
inline constexpr int kExitUsage = 2;

/// Entry point of the `frogsim` tool. `args` excludes the program name.
/// Data goes to `out` (or the --out file), diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace frog
