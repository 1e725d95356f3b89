#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pforge::app {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;  // bad flags, bad config file
inline constexpr int kExitStage = 3;   // a pipeline stage failed

/// Entry point of the `pforge` executable. `args` excludes the program
/// name. Subcommands: fixture, sample, edit, reconstruct, render, eval,
/// serve.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pforge::app
