#include "music/metrics.hpp"

#include "music/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace music {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct FilteredStep {
  Vector dz;
  double norm = 0.0;
  int start = 0; // state index the step leaves
  int end = 0;   // state index the step lands on
};

void check_data(const TrajectoryData& traj, const char* who) {
  if (traj.states.empty())
    throw ContractError(std::string(who) + ": empty trajectory");
  if (traj.bmus.size() != traj.states.size())
    throw ContractError(std::string(who) + ": one BMU per state required");
}

std::vector<FilteredStep> nonzero_steps(const TrajectoryData& traj) {
  std::vector<FilteredStep> out;
  for (int t = 0; t + 1 < traj.state_count(); ++t) {
    FilteredStep s;
    s.dz = traj.states[t + 1] - traj.states[t];
    s.norm = s.dz.norm();
    if (s.norm == 0.0) continue;
    s.start = t;
    s.end = t + 1;
    out.push_back(std::move(s));
  }
  return out;
}

double clamped_cosine(const FilteredStep& a, const FilteredStep& b) {
  const double c = a.dz.dot(b.dz) / (a.norm * b.norm);
  return std::clamp(c, -1.0, 1.0);
}

} // namespace

TrajectoryData trajectory_data(const Trajectory& traj) {
  TrajectoryData data;
  data.states = traj.states;
  data.bmus = traj.bmu_per_state;
  return data;
}

SeriesResult step_continuity(const TrajectoryData& traj) {
  check_data(traj, "step_continuity");
  if (traj.raw_step_count() < 2)
    throw ContractError("step_continuity: at least 2 steps required");
  const auto steps = nonzero_steps(traj);
  SeriesResult result;
  if (steps.size() < 2) {
    result.flagged = true;
    return result;
  }
  for (size_t i = 0; i + 1 < steps.size(); ++i)
    result.values.push_back(clamped_cosine(steps[i], steps[i + 1]));
  return result;
}

SeriesResult global_continuity(const TrajectoryData& traj) {
  check_data(traj, "global_continuity");
  if (traj.raw_step_count() < 1)
    throw ContractError("global_continuity: at least 1 step required");
  const auto steps = nonzero_steps(traj);
  SeriesResult result;
  if (steps.empty()) {
    result.flagged = true;
    return result;
  }
  // Reference is the first nonzero step; flag when the raw first step was
  // zero so the re-basing is visible to callers.
  if (steps.front().start != 0) result.flagged = true;
  for (const auto& s : steps)
    result.values.push_back(clamped_cosine(steps.front(), s));
  return result;
}

double transition_rate(const TrajectoryData& traj) {
  check_data(traj, "transition_rate");
  const int T = traj.raw_step_count();
  if (T == 0) return 0.0;
  int changes = 0;
  for (int t = 0; t + 1 < traj.state_count(); ++t)
    if (traj.bmus[t + 1] != traj.bmus[t]) ++changes;
  return static_cast<double>(changes) / static_cast<double>(T);
}

DwellStats dwell_stats(const TrajectoryData& traj) {
  check_data(traj, "dwell_stats");
  DwellStats stats;
  int run = 1;
  for (int t = 1; t < traj.state_count(); ++t) {
    if (traj.bmus[t] == traj.bmus[t - 1]) {
      ++run;
    } else {
      stats.lengths.push_back(run);
      run = 1;
    }
  }
  stats.lengths.push_back(run);

  std::vector<double> as_double(stats.lengths.begin(), stats.lengths.end());
  stats.median = median(as_double);
  stats.iqr = iqr(std::move(as_double));
  return stats;
}

CurvatureStats curvature(const TrajectoryData& traj) {
  check_data(traj, "curvature");
  const auto steps = nonzero_steps(traj);
  if (steps.size() < 2)
    throw ContractError("curvature: at least 2 nonzero steps required");

  std::vector<double> within, trans;
  for (size_t i = 0; i + 1 < steps.size(); ++i) {
    const double theta = std::acos(clamped_cosine(steps[i], steps[i + 1]));
    const double kappa = theta / steps[i].norm;
    // The pair is a transition when the first step of the pair lands in a
    // different BMU cell than it left.
    if (traj.bmus[steps[i].end] != traj.bmus[steps[i].start])
      trans.push_back(kappa);
    else
      within.push_back(kappa);
  }

  CurvatureStats stats;
  stats.within_flagged = within.empty();
  stats.trans_flagged = trans.empty();
  stats.within_median = within.empty() ? kNaN : median(std::move(within));
  stats.trans_median = trans.empty() ? kNaN : median(std::move(trans));
  return stats;
}

GeodesicEfficiency geodesic_efficiency(const TrajectoryData& traj) {
  check_data(traj, "geodesic_efficiency");
  double path = 0.0;
  for (int t = 0; t + 1 < traj.state_count(); ++t)
    path += (traj.states[t + 1] - traj.states[t]).norm();
  GeodesicEfficiency result;
  if (path == 0.0) {
    result.value = kNaN;
    result.flagged = true;
    return result;
  }
  result.value = (traj.states.back() - traj.states.front()).norm() / path;
  return result;
}

SegmentedContinuity segmented_continuity(const TrajectoryData& traj) {
  check_data(traj, "segmented_continuity");
  const auto steps = nonzero_steps(traj);

  SegmentedContinuity result;
  // Dwell segments as [first state, last state] index ranges.
  int seg_start = 0;
  for (int t = 1; t <= traj.state_count(); ++t) {
    if (t < traj.state_count() && traj.bmus[t] == traj.bmus[t - 1]) continue;
    const int seg_end = t - 1;
    // Nonzero steps fully inside this segment.
    std::vector<const FilteredStep*> inside;
    for (const auto& s : steps)
      if (s.start >= seg_start && s.end <= seg_end) inside.push_back(&s);
    if (inside.size() >= 2) {
      double sum = 0.0;
      for (size_t i = 0; i + 1 < inside.size(); ++i)
        sum += clamped_cosine(*inside[i], *inside[i + 1]);
      result.segment_means.push_back(sum /
                                     static_cast<double>(inside.size() - 1));
    }
    seg_start = t;
  }

  if (result.segment_means.empty()) {
    result.flagged = true;
    result.median = kNaN;
    result.iqr = kNaN;
    return result;
  }
  result.median = median(result.segment_means);
  result.iqr = iqr(result.segment_means);
  return result;
}

TrajectoryMetrics compute_trajectory_metrics(const TrajectoryData& traj) {
  check_data(traj, "compute_trajectory_metrics");
  TrajectoryMetrics m;

  const auto steps = nonzero_steps(traj);
  m.no_nonzero_steps = steps.empty();
  m.zero_initial_step =
      traj.raw_step_count() > 0 && (steps.empty() || steps.front().start != 0);

  if (traj.raw_step_count() >= 2) {
    const auto sc = step_continuity(traj);
    m.step_continuity = sc.values;
  }
  if (traj.raw_step_count() >= 1) {
    const auto gc = global_continuity(traj);
    m.global_continuity = gc.values;
  }

  m.transition_rate = transition_rate(traj);

  const auto dwell = dwell_stats(traj);
  m.dwell_lengths = dwell.lengths;
  m.dwell_median = dwell.median;
  m.dwell_iqr = dwell.iqr;

  if (steps.size() >= 2) {
    const auto curv = curvature(traj);
    m.curvature_within = curv.within_median;
    m.curvature_trans = curv.trans_median;
    m.no_within_curvature = curv.within_flagged;
    m.no_transition_curvature = curv.trans_flagged;
  } else {
    m.curvature_within = kNaN;
    m.curvature_trans = kNaN;
    m.no_within_curvature = true;
    m.no_transition_curvature = true;
  }

  const auto eff = geodesic_efficiency(traj);
  m.geodesic_efficiency = eff.value;
  m.zero_path_length = eff.flagged;

  const auto seg = segmented_continuity(traj);
  m.segment_means = seg.segment_means;
  m.segmented_median = seg.median;
  m.segmented_iqr = seg.iqr;
  m.no_multi_step_segment = seg.flagged;

  return m;
}

} // namespace music
