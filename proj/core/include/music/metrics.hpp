#pragma once

#include "music/music.hpp"
#include "music/types.hpp"

#include <vector>

namespace music {

/// Minimal view of a trajectory for metric computation: the visited states
/// and the BMU recorded at each state. Step t is states[t+1] - states[t].
/// Zero-length steps are dropped from direction-based statistics (their
/// cosine is undefined) but still count as dwell time.
struct TrajectoryData {
  std::vector<Vector> states;
  std::vector<int> bmus;

  int state_count() const { return static_cast<int>(states.size()); }
  int raw_step_count() const { return state_count() - 1; }
};

TrajectoryData trajectory_data(const Trajectory& traj);

struct SeriesResult {
  std::vector<double> values;
  bool flagged = false; // set when the series is empty or its reference
                        // direction was degenerate
};

/// Cosine between consecutive nonzero update directions:
/// C_t = <dz_t, dz_{t+1}> / (||dz_t|| ||dz_{t+1}||), clamped to [-1, 1].
/// Requires at least 2 raw steps; all-zero steps give an empty flagged
/// result.
SeriesResult step_continuity(const TrajectoryData& traj);

/// Cosine between each nonzero step and the first nonzero step. Flagged
/// when the raw first step has zero length (reference re-based onto the
/// first nonzero step) or when no nonzero step exists.
SeriesResult global_continuity(const TrajectoryData& traj);

/// Fraction of state pairs whose BMU differs:
/// (1/T) sum_t 1[bmu_{t+1} != bmu_t]. A single-state trajectory rates 0.
double transition_rate(const TrajectoryData& traj);

struct DwellStats {
  std::vector<int> lengths; // maximal constant-BMU runs, in order; the
                            // lengths sum to the number of states
  double median = 0.0;
  double iqr = 0.0;
};

DwellStats dwell_stats(const TrajectoryData& traj);

struct CurvatureStats {
  /// Median of kappa_t = arccos(clamped C_t) / ||dz_t|| over pairs whose
  /// first step does not change the BMU, in radians per input-space unit.
  double within_median = 0.0;
  /// Same median over pairs whose first step lands in a different BMU cell.
  double trans_median = 0.0;
  bool within_flagged = false; // no such pair existed, median is NaN
  bool trans_flagged = false;
};

/// Requires at least 2 nonzero steps.
CurvatureStats curvature(const TrajectoryData& traj);

struct GeodesicEfficiency {
  double value = 0.0; // ||z_T - z_0|| / sum_t ||dz_t||, in [0, 1]
  bool flagged = false; // total path length was zero, value is NaN
};

GeodesicEfficiency geodesic_efficiency(const TrajectoryData& traj);

struct SegmentedContinuity {
  std::vector<double> segment_means; // mean C_t inside each dwell segment
                                     // holding at least 2 nonzero steps
  double median = 0.0;
  double iqr = 0.0;
  bool flagged = false; // no qualifying segment
};

SegmentedContinuity segmented_continuity(const TrajectoryData& traj);

/// Every trajectory metric in one bundle, tolerant of degenerate
/// trajectories: fields whose operation preconditions fail stay empty/NaN
/// with their flag set instead of throwing.
struct TrajectoryMetrics {
  std::vector<double> step_continuity;
  std::vector<double> global_continuity;
  double transition_rate = 0.0;
  std::vector<int> dwell_lengths;
  double dwell_median = 0.0;
  double dwell_iqr = 0.0;
  double curvature_within = 0.0;
  double curvature_trans = 0.0;
  double geodesic_efficiency = 0.0;
  std::vector<double> segment_means;
  double segmented_median = 0.0;
  double segmented_iqr = 0.0;

  bool no_nonzero_steps = false;
  bool zero_initial_step = false;
  bool no_within_curvature = false;
  bool no_transition_curvature = false;
  bool zero_path_length = false;
  bool no_multi_step_segment = false;
};

TrajectoryMetrics compute_trajectory_metrics(const TrajectoryData& traj);

} // namespace music
