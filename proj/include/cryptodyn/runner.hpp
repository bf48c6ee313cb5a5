#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "cryptodyn/config.hpp"
#include "cryptodyn/evolution.hpp"

namespace cryptodyn::cli {

enum ExitCode : int { kExitOk = 0, kExitNumeric = 1, kExitConfig = 2 };

struct RunOptions {
    std::optional<std::filesystem::path> out_dir;  // overrides output.dir; default ./out
    std::optional<std::uint64_t> seed;             // overrides the config seed
    bool quiet = false;
};

// Executes one configured command. Library failures are reported as
// "<ErrorName>: <message>" on err and map to exit 1.
int run(const RunConfig& config, const RunOptions& options, std::ostream& out, std::ostream& err);

// Delimited table: t, Re/Im Phi_j, Re/Im Psi_j, Re/Im overlap, cumulative
// drift, then metric_norm and cumulative metric drift. %.17g throughout.
std::string trajectory_table(const StateTrajectory& traj, char delimiter = ',');

}  // namespace cryptodyn::cli
