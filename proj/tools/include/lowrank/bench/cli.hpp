#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lowrank::bench {

/// Process exit codes of the lowrank-admm tool.
enum ExitCode : int { kExitOk = 0, kExitRuntime = 1, kExitUsage = 2 };

/// Entry point of the command-line tool, minus argv[0]:
///   lowrank-admm {solve|sweep|phase|trace} [flags]
/// The LOWRANK_ADMM_SEED environment variable, when set, overrides --seed.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lowrank::bench
