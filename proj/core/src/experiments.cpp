#include "music/experiments.hpp"

#include "music/geometry.hpp"
#include "music/stats.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <random>
#include <utility>

namespace music {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open for writing: " + path);
  }
  return out;
}

} // namespace

// ---------------------------------------------------------------------------
// Mixture-model fixture
// ---------------------------------------------------------------------------

GmmFixture make_gmm_fixture(const GmmFixtureConfig& config) {
  if (config.n_train < 2) {
    throw ContractError("fixture needs at least 2 training samples");
  }
  GmmFixture fx;
  fx.spec = triangle_gmm_spec(config.dim);
  GmmSample sample = gmm_sample(fx.spec, config.n_train, config.seed);
  fx.standardizer = standardizer_fit(sample.data);
  fx.train = standardize(fx.standardizer, sample.data);
  fx.train_component = std::move(sample.component);

  SomTrainConfig tc;
  tc.epochs = config.epochs;
  tc.seed = config.seed + 1;
  fx.som = train_som(fx.train, config.lattice_rows, config.lattice_cols,
                     config.topology, tc);

  const int k = fx.spec.components();
  fx.component_means.resize(k, config.dim);
  for (int c = 0; c < k; ++c) {
    fx.component_means.row(c) =
        standardize(fx.standardizer, Vector(fx.spec.means.row(c).transpose()))
            .transpose();
  }
  fx.prototype_component.resize(fx.som.units());
  for (int j = 0; j < fx.som.units(); ++j) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (int c = 0; c < k; ++c) {
      const double d =
          (fx.som.weights.row(j) - fx.component_means.row(c)).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = c;
      }
    }
    fx.prototype_component[j] = best;
  }
  // Expose the nearest-mean assignment as the map's labels.
  fx.som.labels = fx.prototype_component;
  return fx;
}

// ---------------------------------------------------------------------------
// Inversion accuracy vs row count
// ---------------------------------------------------------------------------

bool InversionSweepResult::passes_thresholds() const {
  if (rows.empty()) {
    return false;
  }
  for (const auto& row : rows) {
    if (row.n >= dim && !(row.median_error < 1e-9)) {
      return false;
    }
    if (row.n <= dim - 2 && !(row.median_error > 1e-2)) {
      return false;
    }
  }
  return true;
}

InversionSweepResult experiment_inversion_vs_n(
    const PrototypeSet& som, const Matrix& test_points,
    const std::vector<int>& n_values) {
  if (test_points.rows() < 1) {
    throw ContractError("inversion sweep needs at least one test point");
  }
  if (test_points.cols() != som.dim()) {
    throw ContractError("test point dimension does not match the map");
  }
  if (n_values.empty()) {
    throw ContractError("inversion sweep needs at least one row count");
  }
  for (int n : n_values) {
    if (n < 1 || n > som.units() - 1) {
      throw ContractError("row count must lie in [1, units - 1]");
    }
  }

  InversionSweepResult result;
  result.dim = som.dim();
  std::vector<std::vector<double>> errors(n_values.size());
  for (auto& e : errors) {
    e.reserve(static_cast<std::size_t>(test_points.rows()));
  }

  std::vector<int> order(static_cast<std::size_t>(som.units()));
  for (Eigen::Index p = 0; p < test_points.rows(); ++p) {
    const Vector z = test_points.row(p).transpose();
    const Vector a = activation(z, som);
    const int anchor = bmu(z, som);

    // Other units ordered by distance to the anchor's prototype.
    order.clear();
    for (int j = 0; j < som.units(); ++j) {
      if (j != anchor) {
        order.push_back(j);
      }
    }
    const Vector wr = som.weights.row(anchor).transpose();
    std::vector<double> dist(static_cast<std::size_t>(som.units()), 0.0);
    for (int j : order) {
      dist[static_cast<std::size_t>(j)] =
          (som.weights.row(j).transpose() - wr).squaredNorm();
    }
    std::sort(order.begin(), order.end(), [&](int x, int y) {
      const double dx = dist[static_cast<std::size_t>(x)];
      const double dy = dist[static_cast<std::size_t>(y)];
      return dx != dy ? dx < dy : x < y;
    });

    for (std::size_t i = 0; i < n_values.size(); ++i) {
      const std::vector<int> others(order.begin(),
                                    order.begin() + n_values[i]);
      const AnchoredSystem system =
          build_anchored_system(som, a, anchor, others);
      const InversionSolution sol = solve_inversion(system);
      errors[i].push_back((sol.z - z).norm());
    }
  }

  result.rows.reserve(n_values.size());
  for (std::size_t i = 0; i < n_values.size(); ++i) {
    InversionSweepRow row;
    row.n = n_values[i];
    row.median_error = median(errors[i]);
    row.q1 = quantile(errors[i], 0.25);
    row.q3 = quantile(errors[i], 0.75);
    result.rows.push_back(row);
  }
  return result;
}

void write_inversion_sweep_csv(const std::string& path,
                               const InversionSweepResult& result) {
  std::ofstream out = open_out(path);
  out << "n,median_error,q1,q3\n";
  for (const auto& row : result.rows) {
    out << row.n << ',' << g17(row.median_error) << ',' << g17(row.q1) << ','
        << g17(row.q3) << '\n';
  }
}

// ---------------------------------------------------------------------------
// Noise sensitivity vs conditioning
// ---------------------------------------------------------------------------

bool NoiseScalingResult::passes_thresholds() const {
  return slope > -1.3 && slope < -0.7 && max_clean_error < 1e-9;
}

NoiseScalingResult experiment_noise_vs_conditioning(int dim, int trials,
                                                    double sigma,
                                                    std::uint64_t seed) {
  if (dim < 2) {
    throw ContractError("noise experiment needs dim >= 2");
  }
  if (trials < 1) {
    throw ContractError("noise experiment needs at least one trial");
  }
  if (!(sigma > 0.0)) {
    throw ContractError("noise scale must be positive");
  }

  NoiseScalingResult result;
  result.sigma = sigma;
  result.scatter.reserve(static_cast<std::size_t>(trials));

  Rng rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  constexpr int kPrototypes = 25;
  constexpr double kScaleFloor = 3e-3; // last-coordinate shrink range bottom

  PrototypeSet som;
  som.lattice_rows = 5;
  som.lattice_cols = kPrototypes / 5;
  som.topology = Topology::Rectangular;
  som.weights.resize(kPrototypes, dim);

  std::vector<int> others;
  others.reserve(kPrototypes - 1);
  for (int t = 0; t < trials; ++t) {
    // Random geometry whose last coordinate is shrunk by a log-uniform
    // factor, spreading sigma_min over several decades.
    const double scale = std::pow(10.0, std::log10(kScaleFloor) * uni(rng));
    for (int j = 0; j < kPrototypes; ++j) {
      for (int dcol = 0; dcol < dim; ++dcol) {
        som.weights(j, dcol) = gauss(rng);
      }
      som.weights(j, dim - 1) *= scale;
    }
    Vector z(dim);
    for (int dcol = 0; dcol < dim; ++dcol) {
      z(dcol) = gauss(rng);
    }
    z(dim - 1) *= scale;

    const Vector a = activation(z, som);
    const int anchor = bmu(z, som);
    others.clear();
    for (int j = 0; j < kPrototypes; ++j) {
      if (j != anchor) {
        others.push_back(j);
      }
    }

    const AnchoredSystem clean_system =
        build_anchored_system(som, a, anchor, others);
    const InversionSolution clean = solve_inversion(clean_system);
    result.max_clean_error =
        std::max(result.max_clean_error, (clean.z - z).norm());

    Vector a_noisy = a;
    for (Eigen::Index i = 0; i < a_noisy.size(); ++i) {
      a_noisy(i) += sigma * gauss(rng);
    }
    const AnchoredSystem noisy_system =
        build_anchored_system(som, a_noisy, anchor, others);
    const InversionSolution noisy = solve_inversion(noisy_system);
    result.scatter.emplace_back(clean.diagnostics.sigma_min,
                                (noisy.z - z).norm());
  }

  // Equal-width bins in log10(sigma_min); small bins are dropped before the
  // slope fit so stray tails cannot dominate it.
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& [smin, err] : result.scatter) {
    const double l = std::log10(smin);
    lo = std::min(lo, l);
    hi = std::max(hi, l);
  }
  constexpr int kBins = 12;
  const double width = (hi - lo) / kBins;
  std::vector<std::vector<double>> bin_err(kBins);
  std::vector<std::vector<double>> bin_log(kBins);
  for (const auto& [smin, err] : result.scatter) {
    const double l = std::log10(smin);
    int b = width > 0.0 ? static_cast<int>((l - lo) / width) : 0;
    b = std::clamp(b, 0, kBins - 1);
    bin_err[static_cast<std::size_t>(b)].push_back(err);
    bin_log[static_cast<std::size_t>(b)].push_back(l);
  }
  const int min_count = std::max(20, trials / 400);
  for (int b = 0; b < kBins; ++b) {
    const auto& errs = bin_err[static_cast<std::size_t>(b)];
    if (static_cast<int>(errs.size()) < min_count) {
      continue;
    }
    NoiseScalingBin bin;
    bin.count = static_cast<int>(errs.size());
    double sum_log = 0.0;
    for (double l : bin_log[static_cast<std::size_t>(b)]) {
      sum_log += l;
    }
    bin.log10_sigma_min = sum_log / bin.count;
    double sum_err = 0.0;
    for (double e : errs) {
      sum_err += e;
    }
    bin.mean_error = sum_err / bin.count;
    bin.median_error = median(errs);
    result.bins.push_back(bin);
  }

  if (result.bins.size() >= 2) {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double n = static_cast<double>(result.bins.size());
    for (const auto& bin : result.bins) {
      const double x = bin.log10_sigma_min;
      const double y = std::log10(bin.median_error);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    result.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  } else {
    result.slope = kNaN;
  }
  return result;
}

void write_noise_scaling_csv(const std::string& scatter_path,
                             const std::string& bins_path,
                             const NoiseScalingResult& result) {
  {
    std::ofstream out = open_out(scatter_path);
    out << "sigma_min,error\n";
    for (const auto& [smin, err] : result.scatter) {
      out << g17(smin) << ',' << g17(err) << '\n';
    }
  }
  {
    std::ofstream out = open_out(bins_path);
    out << "log10_sigma_min,mean_error,median_error,count\n";
    for (const auto& bin : result.bins) {
      out << g17(bin.log10_sigma_min) << ',' << g17(bin.mean_error) << ','
          << g17(bin.median_error) << ',' << bin.count << '\n';
    }
  }
}

// ---------------------------------------------------------------------------
// Mixture-model trajectory regimes
// ---------------------------------------------------------------------------

MusicConfig gmm_regime_default_config(GmmRegime regime) {
  MusicConfig cfg; // informed-convergence defaults: relative trust, no noise
  cfg.seed = 2026;
  if (regime == GmmRegime::ClusterExploration) {
    cfg.trust.kind = TrustRegion::Kind::Absolute;
    cfg.trust.value = 0.25;
    cfg.sigma_z = 0.06;
    cfg.subsample.kind = SubsampleRule::Kind::SingleRandom;
  }
  return cfg;
}

namespace {

nlohmann::json aggregate_metric(
    const std::vector<TrajectoryMetrics>& metrics,
    const std::function<double(const TrajectoryMetrics&)>& extract) {
  std::vector<double> values;
  values.reserve(metrics.size());
  for (const auto& m : metrics) {
    const double v = extract(m);
    if (std::isfinite(v)) {
      values.push_back(v);
    }
  }
  nlohmann::json j;
  j["n"] = values.size();
  if (values.empty()) {
    j["median"] = nullptr;
    j["iqr"] = nullptr;
  } else {
    j["median"] = median(values);
    j["iqr"] = iqr(values);
  }
  return j;
}

double series_median(const std::vector<double>& values) {
  return values.empty() ? kNaN : median(values);
}

} // namespace

nlohmann::json metrics_table(const std::vector<TrajectoryMetrics>& ms) {
  nlohmann::json table;
  table["transition_rate"] = aggregate_metric(
      ms, [](const TrajectoryMetrics& m) { return m.transition_rate; });
  table["dwell_median"] = aggregate_metric(
      ms, [](const TrajectoryMetrics& m) { return m.dwell_median; });
  table["geodesic_efficiency"] = aggregate_metric(
      ms, [](const TrajectoryMetrics& m) { return m.geodesic_efficiency; });
  table["step_continuity_median"] =
      aggregate_metric(ms, [](const TrajectoryMetrics& m) {
        return series_median(m.step_continuity);
      });
  table["global_continuity_median"] =
      aggregate_metric(ms, [](const TrajectoryMetrics& m) {
        return series_median(m.global_continuity);
      });
  table["curvature_within"] = aggregate_metric(
      ms, [](const TrajectoryMetrics& m) { return m.curvature_within; });
  table["curvature_trans"] = aggregate_metric(
      ms, [](const TrajectoryMetrics& m) { return m.curvature_trans; });
  table["segmented_continuity_median"] = aggregate_metric(
      ms, [](const TrajectoryMetrics& m) { return m.segmented_median; });
  return table;
}

RegimeTrajectoryResult experiment_gmm_trajectories(const GmmFixture& fixture,
                                                   GmmRegime regime,
                                                   int n_traj, int steps,
                                                   const MusicConfig& cfg) {
  if (n_traj < 1) {
    throw ContractError("need at least one trajectory");
  }
  if (steps < 1) {
    throw ContractError("need at least one step per trajectory");
  }

  RegimeTrajectoryResult result;
  result.regime = regime;

  const int informed_target =
      bmu(Vector(fixture.component_means.row(0).transpose()), fixture.som);
  std::vector<int> cluster_targets;
  for (int j = 0; j < fixture.som.units(); ++j) {
    if (fixture.prototype_component[static_cast<std::size_t>(j)] == 0) {
      cluster_targets.push_back(j);
    }
  }
  if (cluster_targets.empty()) {
    throw ContractError("no prototype was assigned to the first component");
  }

  const int dim = fixture.spec.dim();
  std::vector<Matrix> chol;
  chol.reserve(static_cast<std::size_t>(fixture.spec.components()));
  for (const auto& cov : fixture.spec.covariances) {
    chol.push_back(Eigen::LLT<Matrix>(cov).matrixL());
  }

  result.per_trajectory.reserve(static_cast<std::size_t>(n_traj));
  for (int i = 0; i < n_traj; ++i) {
    const int comp = i % fixture.spec.components();
    Rng start_rng(cfg.seed + 7919ull * static_cast<std::uint64_t>(i) + 1ull);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vector g(dim);
    for (int d = 0; d < dim; ++d) {
      g(d) = gauss(start_rng);
    }
    const Vector z0_raw = fixture.spec.means.row(comp).transpose() +
                          chol[static_cast<std::size_t>(comp)] * g;
    const Vector z0 = standardize(fixture.standardizer, z0_raw);

    MusicConfig traj_cfg = cfg;
    traj_cfg.seed = cfg.seed + static_cast<std::uint64_t>(i);
    const TrajectoryMode mode =
        regime == GmmRegime::InformedConvergence
            ? TrajectoryMode(InformedMode{informed_target})
            : TrajectoryMode(ClusterMode{cluster_targets});
    const Trajectory traj =
        run_trajectory(z0, fixture.som, mode, traj_cfg, steps);
    result.per_trajectory.push_back(
        compute_trajectory_metrics(trajectory_data(traj)));
  }

  result.table = metrics_table(result.per_trajectory);
  return result;
}

bool RegimeComparison::passes_thresholds() const {
  if (pairs < 1) {
    return false;
  }
  return wins_transition_rate * 10 >= pairs * 9 &&
         wins_dwell_median * 10 >= pairs * 9 &&
         wins_geodesic_efficiency * 10 >= pairs * 9;
}

RegimeComparison compare_gmm_regimes(const GmmFixture& fixture, int n_traj,
                                     int steps) {
  RegimeComparison cmp;
  cmp.informed = experiment_gmm_trajectories(
      fixture, GmmRegime::InformedConvergence, n_traj, steps,
      gmm_regime_default_config(GmmRegime::InformedConvergence));
  cmp.cluster = experiment_gmm_trajectories(
      fixture, GmmRegime::ClusterExploration, n_traj, steps,
      gmm_regime_default_config(GmmRegime::ClusterExploration));
  cmp.pairs = n_traj;
  for (int i = 0; i < n_traj; ++i) {
    const auto& a = cmp.informed.per_trajectory[static_cast<std::size_t>(i)];
    const auto& b = cmp.cluster.per_trajectory[static_cast<std::size_t>(i)];
    if (a.transition_rate < b.transition_rate) {
      ++cmp.wins_transition_rate;
    }
    if (std::isfinite(a.dwell_median) && std::isfinite(b.dwell_median) &&
        a.dwell_median > b.dwell_median) {
      ++cmp.wins_dwell_median;
    }
    if (std::isfinite(a.geodesic_efficiency) &&
        std::isfinite(b.geodesic_efficiency) &&
        a.geodesic_efficiency > b.geodesic_efficiency) {
      ++cmp.wins_geodesic_efficiency;
    }
  }
  return cmp;
}

// ---------------------------------------------------------------------------
// Digit-map transition
// ---------------------------------------------------------------------------

MnistPipeline mnist_pipeline_fit(const MnistData& train, int lattice_rows,
                                 int lattice_cols, Topology topology,
                                 const SomTrainConfig& train_config,
                                 double whiten_eps) {
  MnistPipeline pipeline;
  pipeline.transform = pca_whiten_fit(train.data, whiten_eps);
  const Matrix whitened =
      pca_whiten_apply(pipeline.transform, train.data, WhitenDirection::Forward);
  pipeline.som = train_som(whitened, lattice_rows, lattice_cols, topology,
                           train_config);
  pipeline.som.labels = label_prototypes(pipeline.som, whitened, train.labels);
  return pipeline;
}

bool MnistTransitionResult::passes_thresholds() const {
  return reached && std::isfinite(median_step_continuity) &&
         std::isfinite(final_global_continuity) &&
         median_step_continuity > final_global_continuity;
}

MnistTransitionResult experiment_mnist_transition(
    const PrototypeSet& som, const WhiteningTransform& transform,
    const Vector& source_image, int target_unit, const MusicConfig& cfg,
    int max_steps) {
  if (target_unit < 0 || target_unit >= som.units()) {
    throw ContractError("target unit index out of range");
  }
  if (som.labels.empty() ||
      som.labels[static_cast<std::size_t>(target_unit)] < 0) {
    throw ContractError("target unit carries no label");
  }
  if (max_steps < 1) {
    throw ContractError("need a positive step budget");
  }
  if (source_image.size() != transform.mean.size()) {
    throw ContractError("source image dimension does not match the transform");
  }
  cfg.validate();

  MnistTransitionResult result;
  result.trajectory.mode = "informed";
  result.trajectory.config = cfg;

  Vector z = pca_whiten_apply(transform, source_image,
                              WhitenDirection::Forward);
  if (z.size() != som.dim()) {
    throw ContractError("whitened dimension does not match the map");
  }

  Rng rng(cfg.seed);
  result.trajectory.states.push_back(z);
  result.trajectory.bmu_per_state.push_back(bmu(z, som));
  for (int t = 0;
       t < max_steps && result.trajectory.bmu_per_state.back() != target_unit;
       ++t) {
    StepResult step = informed_step(z, som, target_unit, cfg, rng);
    z += step.dz;
    result.trajectory.steps.push_back(std::move(step));
    result.trajectory.states.push_back(z);
    result.trajectory.bmu_per_state.push_back(bmu(z, som));
  }

  for (std::size_t i = 0; i < result.trajectory.bmu_per_state.size(); ++i) {
    if (result.trajectory.bmu_per_state[i] == target_unit) {
      result.reached = true;
      result.reach_step = static_cast<int>(i);
      break;
    }
  }

  const TrajectoryData data = trajectory_data(result.trajectory);
  if (data.raw_step_count() >= 2) {
    result.step_continuity = step_continuity(data).values;
    result.global_continuity = global_continuity(data).values;
  }
  result.median_step_continuity = series_median(result.step_continuity);
  result.final_global_continuity =
      result.global_continuity.empty() ? kNaN : result.global_continuity.back();

  std::vector<std::size_t> decode_idx;
  for (std::size_t i = 0; i < result.trajectory.states.size(); i += 25) {
    decode_idx.push_back(i);
  }
  if (decode_idx.empty() ||
      decode_idx.back() != result.trajectory.states.size() - 1) {
    decode_idx.push_back(result.trajectory.states.size() - 1);
  }
  result.decoded_states.resize(static_cast<Eigen::Index>(decode_idx.size()),
                               transform.mean.size());
  for (std::size_t i = 0; i < decode_idx.size(); ++i) {
    result.decoded_states.row(static_cast<Eigen::Index>(i)) =
        pca_whiten_apply(transform, result.trajectory.states[decode_idx[i]],
                         WhitenDirection::Inverse)
            .transpose();
  }
  return result;
}

void write_continuity_curves_csv(const std::string& path,
                                 const MnistTransitionResult& result) {
  std::ofstream out = open_out(path);
  out << "index,step_continuity,global_continuity\n";
  const std::size_t n =
      std::max(result.step_continuity.size(), result.global_continuity.size());
  for (std::size_t i = 0; i < n; ++i) {
    out << i << ',';
    if (i < result.step_continuity.size()) {
      out << g17(result.step_continuity[i]);
    }
    out << ',';
    if (i < result.global_continuity.size()) {
      out << g17(result.global_continuity[i]);
    }
    out << '\n';
  }
}

// ---------------------------------------------------------------------------
// Preservation drift: free MUSIC vs radial baseline
// ---------------------------------------------------------------------------

bool BaselineCompareResult::passes_thresholds() const {
  return n_seeds > 0 && wins * 5 >= n_seeds * 4 &&
         max_norm_mismatch < 1e-10;
}

BaselineCompareResult experiment_baseline_comparison(
    const Vector& z0, const PrototypeSet& som, int steps, double step_len,
    const std::vector<std::uint64_t>& seeds) {
  if (steps < 1) {
    throw ContractError("drift comparison needs at least one step");
  }
  if (!(step_len > 0.0)) {
    throw ContractError("step length must be positive");
  }
  if (seeds.empty()) {
    throw ContractError("drift comparison needs at least one baseline seed");
  }
  if (z0.size() != som.dim()) {
    throw ContractError("start point dimension does not match the map");
  }

  BaselineCompareResult result;
  result.n_seeds = static_cast<int>(seeds.size());

  const Vector a0 = activation(z0, som);
  const auto drift_of = [&](const Vector& z) {
    return (activation(z, som) - a0).cwiseAbs().sum();
  };

  MusicConfig cfg;
  cfg.trust.kind = TrustRegion::Kind::Absolute;
  cfg.trust.value = step_len;
  cfg.validate();

  Rng music_rng(0); // never consumed: every noise scale is zero
  Vector z = z0;
  result.music_drift.reserve(static_cast<std::size_t>(steps) + 1);
  result.music_drift.push_back(0.0);
  for (int t = 0; t < steps; ++t) {
    const StepResult step = free_step(z, som, cfg, music_rng);
    result.max_norm_mismatch = std::max(
        result.max_norm_mismatch, std::abs(step.dz.norm() - step_len));
    z += step.dz;
    result.music_drift.push_back(drift_of(z));
  }

  result.baseline_drift.reserve(seeds.size());
  for (std::uint64_t seed : seeds) {
    Rng rng(seed);
    std::uniform_int_distribution<int> pick(0, som.units() - 1);
    Vector zb = z0;
    std::vector<double> series;
    series.reserve(static_cast<std::size_t>(steps) + 1);
    series.push_back(0.0);
    for (int t = 0; t < steps; ++t) {
      const int unit = pick(rng);
      const Vector dz = radial_baseline_step(zb, som, unit, step_len);
      result.max_norm_mismatch = std::max(result.max_norm_mismatch,
                                          std::abs(dz.norm() - step_len));
      zb += dz;
      series.push_back(drift_of(zb));
    }
    if (result.music_drift.back() < series.back()) {
      ++result.wins;
    }
    result.baseline_drift.push_back(std::move(series));
  }
  return result;
}

void write_drift_csv(const std::string& path,
                     const BaselineCompareResult& result) {
  std::ofstream out = open_out(path);
  out << "step,music_drift,baseline_median,baseline_q1,baseline_q3\n";
  for (std::size_t t = 0; t < result.music_drift.size(); ++t) {
    std::vector<double> at_t;
    at_t.reserve(result.baseline_drift.size());
    for (const auto& series : result.baseline_drift) {
      if (t < series.size()) {
        at_t.push_back(series[t]);
      }
    }
    out << t << ',' << g17(result.music_drift[t]);
    if (!at_t.empty()) {
      out << ',' << g17(median(at_t)) << ',' << g17(quantile(at_t, 0.25))
          << ',' << g17(quantile(at_t, 0.75));
    } else {
      out << ",,,";
    }
    out << '\n';
  }
}

} // namespace music
