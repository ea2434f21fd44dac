#include "music/trajectory_io.hpp"

#include "music/config_io.hpp"
#include "music/version.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace music {

namespace {

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.push_back("");
  return out;
}

} // namespace

void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
  if (traj.states.empty())
    throw ContractError("write_trajectory_csv: empty trajectory");
  const int dim = static_cast<int>(traj.states.front().size());

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);

  out << "step";
  for (int d = 0; d < dim; ++d) out << ",z" << d;
  out << ",bmu,dz_norm,targets\n";

  for (size_t t = 0; t < traj.states.size(); ++t) {
    out << t;
    for (int d = 0; d < dim; ++d) out << ',' << fmt_double(traj.states[t][d]);
    out << ',' << traj.bmu_per_state[t] << ',';
    if (t > 0) {
      const StepResult& s = traj.steps[t - 1];
      out << fmt_double(s.dz.norm()) << ',';
      for (size_t i = 0; i < s.selected_targets.size(); ++i) {
        if (i > 0) out << ';';
        out << s.selected_targets[i];
      }
    } else {
      out << ',';
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

TrajectoryData read_trajectory_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);

  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("empty trajectory CSV: " + path);
  const auto header = split(line, ',');
  int dim = 0;
  for (const auto& h : header)
    if (h.size() > 1 && h[0] == 'z') ++dim;
  if (header.size() < 4 || header[0] != "step" || dim == 0)
    throw std::runtime_error("unrecognized trajectory CSV header: " + path);
  const size_t bmu_col = 1 + static_cast<size_t>(dim);

  TrajectoryData data;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    if (fields.size() < bmu_col + 1)
      throw std::runtime_error("short trajectory CSV row: " + path);
    Vector z(dim);
    for (int d = 0; d < dim; ++d) z[d] = std::stod(fields[1 + d]);
    data.states.push_back(std::move(z));
    data.bmus.push_back(std::stoi(fields[bmu_col]));
  }
  if (data.states.empty())
    throw std::runtime_error("trajectory CSV has no rows: " + path);
  return data;
}

nlohmann::json make_run_manifest(const std::string& mode,
                                 const MusicConfig& cfg,
                                 const nlohmann::json& extras) {
  nlohmann::json manifest{
      {"version", kVersion},
      {"mode", mode},
      {"seed", cfg.seed},
      {"config", cfg},
  };
  for (auto it = extras.begin(); it != extras.end(); ++it)
    manifest[it.key()] = it.value();
  return manifest;
}

void write_manifest(const std::string& path, const nlohmann::json& manifest) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << manifest.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path);
}

nlohmann::json metrics_to_json(const TrajectoryMetrics& m) {
  return nlohmann::json{
      {"step_continuity", m.step_continuity},
      {"global_continuity", m.global_continuity},
      {"transition_rate", m.transition_rate},
      {"dwell_lengths", m.dwell_lengths},
      {"dwell_median", m.dwell_median},
      {"dwell_iqr", m.dwell_iqr},
      {"curvature_within", m.curvature_within},
      {"curvature_trans", m.curvature_trans},
      {"geodesic_efficiency", m.geodesic_efficiency},
      {"segment_means", m.segment_means},
      {"segmented_median", m.segmented_median},
      {"segmented_iqr", m.segmented_iqr},
      {"flags",
       {{"no_nonzero_steps", m.no_nonzero_steps},
        {"zero_initial_step", m.zero_initial_step},
        {"no_within_curvature", m.no_within_curvature},
        {"no_transition_curvature", m.no_transition_curvature},
        {"zero_path_length", m.zero_path_length},
        {"no_multi_step_segment", m.no_multi_step_segment}}},
  };
}

} // namespace music
