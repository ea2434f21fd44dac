#pragma once

#include "music/metrics.hpp"
#include "music/music.hpp"

#include <json.hpp>

#include <string>

namespace music {

/// Trajectory CSV layout: header `step,z0,...,z{D-1},bmu,dz_norm,targets`,
/// one row per state. dz_norm and targets describe the step that produced
/// the row's state (empty on the first row); targets are ';'-joined unit
/// indices. Doubles are written with 17 significant digits so a read-back
/// reproduces them exactly.
void write_trajectory_csv(const std::string& path, const Trajectory& traj);

/// Reads the states and BMUs back; enough for every metric.
TrajectoryData read_trajectory_csv(const std::string& path);

/// Run manifest: code version plus mode, seed and the full config echo,
/// merged with caller-provided extras.
nlohmann::json make_run_manifest(const std::string& mode,
                                 const MusicConfig& cfg,
                                 const nlohmann::json& extras);
void write_manifest(const std::string& path, const nlohmann::json& manifest);

/// TrajectoryMetrics as JSON (series, scalars and flags).
nlohmann::json metrics_to_json(const TrajectoryMetrics& m);

} // namespace music
