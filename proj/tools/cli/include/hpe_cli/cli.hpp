#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hpe::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitVerdict = 3;

/// Runs one subcommand; args[0] is the subcommand name (no program name).
/// Exit 0 ok, 1 runtime failure, 2 usage or configuration error, 3 when a
/// check-type subcommand reaches a fail verdict.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hpe::cli
