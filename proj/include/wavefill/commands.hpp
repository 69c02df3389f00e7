#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "wavefill/config.hpp"

namespace wavefill {

/// Trajectories named by the config's dataset block. A matrix source has no
/// trajectories and raises a config error.
TrajectorySet load_dataset(const RunConfig& config);

// Each command writes its artifacts plus manifest.json and timing.json into
// config.output_dir and logs one summary line per artifact group to `log`.
void cmd_build_grid(const RunConfig& config, std::ostream& log);
void cmd_estimate(const RunConfig& config, std::ostream& log);
void cmd_experiment(const RunConfig& config, std::ostream& log);
void cmd_synth(const RunConfig& config, std::ostream& log);

/// Full command line entry point. Returns 0 on success, 2 for config or usage
/// errors, 3 for runtime failures.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace wavefill
