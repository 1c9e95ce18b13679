#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "hpe/dynamics.hpp"

namespace hpe {

/// SimConfig as a JSON object string (all fields, scheme by name).
std::string sim_config_json(const SimConfig& cfg);

/// CSV with header `t,replica,mode_k1,mode_k2,omega,G,G_mild,M`, one row per
/// (replica, recorded time, mode), numbers with 17 significant digits.
void write_observables_csv(std::ostream& os, const std::vector<Trajectory>& trajectories,
                           const std::vector<ModeIndex>& modes);

/// Writes observables.csv and states/r<replica>_i<record>.txt snapshots into
/// `dir` (created if needed). Returns the written paths relative to `dir`.
std::vector<std::filesystem::path> write_run_outputs(const std::filesystem::path& dir,
                                                     const std::vector<Trajectory>& trajectories,
                                                     const std::vector<ModeIndex>& modes);

}  // namespace hpe
