#pragma once

#include <string>
#include <vector>

namespace vidiff {

/// Full command-line entry point (args exclude the program name).
/// Subcommands: generate, ablate, invert, metrics. Returns 0 on success,
/// 2 on configuration/usage errors, 1 on runtime errors.
int run_cli(const std::vector<std::string>& args);

}  // namespace vidiff
