#pragma once

#include "music/gmm.hpp"
#include "music/inversion.hpp"
#include "music/metrics.hpp"
#include "music/mnist_io.hpp"
#include "music/music.hpp"
#include "music/som.hpp"
#include "music/whitening.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace music {

// ---------------------------------------------------------------------------
// Shared mixture-model fixture
// ---------------------------------------------------------------------------

/// Triangle-mixture experiment setup: sample the mixture, z-score it, train
/// the SOM on the standardized data, and assign every prototype to the
/// nearest standardized component mean.
struct GmmFixture {
  GmmSpec spec;
  Standardizer standardizer;
  PrototypeSet som;
  Matrix train; // standardized training data
  std::vector<int> train_component;
  std::vector<int> prototype_component;
  Matrix component_means; // standardized, one row per component
};

struct GmmFixtureConfig {
  int dim = 10;
  int lattice_rows = 20;
  int lattice_cols = 20;
  Topology topology = Topology::Rectangular;
  int n_train = 25000;
  int epochs = 10;
  std::uint64_t seed = 41;
};

GmmFixture make_gmm_fixture(const GmmFixtureConfig& config = {});

// ---------------------------------------------------------------------------
// Inversion accuracy vs row count
// ---------------------------------------------------------------------------

struct InversionSweepRow {
  int n = 0; // rows in the anchored system (anchor + n nearest others)
  double median_error = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
};

struct InversionSweepResult {
  std::vector<InversionSweepRow> rows;
  int dim = 0;

  /// Thresholds: median < 1e-9 whenever n >= dim, median > 1e-2 whenever
  /// n <= dim - 2.
  bool passes_thresholds() const;
};

/// For every test point: query activations, anchor at the BMU, add the n
/// prototypes nearest to the BMU's weight vector (one row each), solve, and
/// record ||z - z_hat||. Medians and quartiles per n.
InversionSweepResult experiment_inversion_vs_n(
    const PrototypeSet& som, const Matrix& test_points,
    const std::vector<int>& n_values);

void write_inversion_sweep_csv(const std::string& path,
                               const InversionSweepResult& result);

// ---------------------------------------------------------------------------
// Noise sensitivity vs conditioning
// ---------------------------------------------------------------------------

struct NoiseScalingBin {
  double log10_sigma_min = 0.0; // bin center (mean of member log10 values)
  double mean_error = 0.0;
  double median_error = 0.0;
  int count = 0;
};

struct NoiseScalingResult {
  std::vector<std::pair<double, double>> scatter; // (sigma_min, error)
  std::vector<NoiseScalingBin> bins;
  double slope = 0.0; // log-log fit of binned median error vs sigma_min
  double max_clean_error = 0.0;
  double sigma = 0.0;

  /// Thresholds: slope in [-1.3, -0.7] and every clean solve below 1e-9.
  bool passes_thresholds() const;
};

/// Random anisotropic prototype geometries (the last coordinate is shrunk by
/// a log-uniform factor to spread sigma_min over decades); activations are
/// perturbed i.i.d. with scale sigma; records reconstruction error against
/// sigma_min(B) plus a noiseless solve per trial.
NoiseScalingResult experiment_noise_vs_conditioning(int dim, int trials,
                                                    double sigma,
                                                    std::uint64_t seed = 1234);

void write_noise_scaling_csv(const std::string& scatter_path,
                             const std::string& bins_path,
                             const NoiseScalingResult& result);

// ---------------------------------------------------------------------------
// Mixture-model trajectory regimes
// ---------------------------------------------------------------------------

enum class GmmRegime { InformedConvergence, ClusterExploration };

/// Regime defaults used by the qualification runs: the informed regime
/// crawls deterministically under BMU-relative trust; the cluster regime
/// bounces across the component's units with single-random target draws and
/// step noise under an absolute trust radius.
MusicConfig gmm_regime_default_config(GmmRegime regime);

/// Aggregate per-trajectory metrics into the summary-table layout:
/// metric -> {median, iqr, n} across trajectories, NaN entries skipped.
/// Per-trajectory series (step continuity, global continuity) enter through
/// their per-trajectory medians.
nlohmann::json metrics_table(const std::vector<TrajectoryMetrics>& metrics);

struct RegimeTrajectoryResult {
  GmmRegime regime;
  std::vector<TrajectoryMetrics> per_trajectory;
  nlohmann::json table; // metric -> {median, iqr, n} across trajectories
};

/// Run n_traj trajectories (starts cycle through the mixture components,
/// trajectory i uses seed cfg.seed + i). The informed regime aims at the
/// BMU of the first component's mean; the cluster regime targets every unit
/// assigned to that component.
RegimeTrajectoryResult experiment_gmm_trajectories(const GmmFixture& fixture,
                                                   GmmRegime regime,
                                                   int n_traj, int steps,
                                                   const MusicConfig& cfg);

struct RegimeComparison {
  RegimeTrajectoryResult informed;
  RegimeTrajectoryResult cluster;
  int pairs = 0;
  int wins_transition_rate = 0; // informed lower
  int wins_dwell_median = 0;    // informed higher
  int wins_geodesic_efficiency = 0; // informed higher

  /// Each ordering must win on at least 90% of the paired seeds.
  bool passes_thresholds() const;
};

/// Paired-seed comparison: trajectory i of both regimes shares its start
/// point and seed.
RegimeComparison compare_gmm_regimes(const GmmFixture& fixture, int n_traj,
                                     int steps);

// ---------------------------------------------------------------------------
// Digit-map transition
// ---------------------------------------------------------------------------

/// Whitened-space digit pipeline shared by the CLI and the test tiers.
struct MnistPipeline {
  WhiteningTransform transform;
  PrototypeSet som; // trained and labeled in whitened space
};

MnistPipeline mnist_pipeline_fit(const MnistData& train, int lattice_rows,
                                 int lattice_cols, Topology topology,
                                 const SomTrainConfig& train_config,
                                 double whiten_eps);

struct MnistTransitionResult {
  Trajectory trajectory; // whitened space, informed mode
  std::vector<double> step_continuity;
  std::vector<double> global_continuity;
  bool reached = false;
  int reach_step = -1; // first state whose BMU is the target unit
  double median_step_continuity = 0.0;
  double final_global_continuity = 0.0;
  Matrix decoded_states; // every 25th state (plus the last) in pixel space

  /// Thresholds: target cell reached within the step budget and median local
  /// continuity above the final global-continuity value.
  bool passes_thresholds() const;
};

/// Informed trajectory from a raw source image toward the target unit,
/// stopping early once the BMU equals the target. The target unit must
/// carry a label. Decoding uses the inverse whitening map.
MnistTransitionResult experiment_mnist_transition(
    const PrototypeSet& som, const WhiteningTransform& transform,
    const Vector& source_image, int target_unit, const MusicConfig& cfg,
    int max_steps);

void write_continuity_curves_csv(const std::string& path,
                                 const MnistTransitionResult& result);

// ---------------------------------------------------------------------------
// Preservation drift: free MUSIC vs radial baseline
// ---------------------------------------------------------------------------

struct BaselineCompareResult {
  std::vector<double> music_drift; // cumulative |a_j(z_t) - a_j(z_0)| summed
                                   // over all units, per step
  std::vector<std::vector<double>> baseline_drift; // one series per seed
  int wins = 0;    // seeds where the final MUSIC drift is lower
  int n_seeds = 0;
  double max_norm_mismatch = 0.0; // worst | ||dz|| - step_len | over steps

  /// Thresholds: MUSIC wins at least 80% of the paired seeds and all step
  /// norms match step_len to 1e-10.
  bool passes_thresholds() const;
};

/// The MUSIC run takes deterministic free steps under an absolute trust
/// radius equal to step_len; each baseline run walks radially away from a
/// seed-dependent random unit sequence with the same step length.
BaselineCompareResult experiment_baseline_comparison(
    const Vector& z0, const PrototypeSet& som, int steps, double step_len,
    const std::vector<std::uint64_t>& seeds);

void write_drift_csv(const std::string& path,
                     const BaselineCompareResult& result);

} // namespace music
