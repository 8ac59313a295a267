#pragma once

#include <iosfwd>
#include <span>
#include <string>

namespace k2gen::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

/// Runs one command line. `args` excludes the program name. Subcommands:
/// encode, decode, stats, order, sample, gen-dataset, eval.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

} // namespace k2gen::cli
