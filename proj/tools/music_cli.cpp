// Command-line front end: SOM training, activation inversion, MUSIC
// trajectories, trajectory metrics, and the desk-scale experiments.

#include "music/config_io.hpp"
#include "music/experiments.hpp"
#include "music/geometry.hpp"
#include "music/inversion.hpp"
#include "music/metrics.hpp"
#include "music/mnist_io.hpp"
#include "music/som_io.hpp"
#include "music/stats.hpp"
#include "music/trajectory_io.hpp"
#include "music/version.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Small I/O helpers
// ---------------------------------------------------------------------------

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    if (cell.empty()) {
      continue;
    }
    values.push_back(std::stod(cell));
  }
  return values;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> values;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    if (cell.empty()) {
      continue;
    }
    values.push_back(std::stoi(cell));
  }
  return values;
}

/// Numeric CSV reader. A non-numeric first line is treated as a header and
/// skipped; every data row must have the same number of columns.
music::Matrix read_csv_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open CSV file: " + path);
  }
  std::vector<std::vector<double>> rows;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) {
      continue;
    }
    std::vector<double> row;
    try {
      row = parse_number_list(line);
    } catch (const std::exception&) {
      if (first) {
        first = false;
        continue; // header line
      }
      throw std::runtime_error("non-numeric CSV row in " + path + ": " + line);
    }
    first = false;
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw std::runtime_error("ragged CSV rows in " + path);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) {
    throw std::runtime_error("CSV file has no data rows: " + path);
  }
  music::Matrix m(static_cast<Eigen::Index>(rows.size()),
                  static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          rows[i][j];
    }
  }
  return m;
}

std::vector<int> read_label_csv(const std::string& path) {
  const music::Matrix m = read_csv_matrix(path);
  if (m.cols() != 1) {
    throw std::runtime_error("label CSV must have exactly one column");
  }
  std::vector<int> labels(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    labels[static_cast<std::size_t>(i)] = static_cast<int>(m(i, 0));
  }
  return labels;
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open for writing: " + path);
  }
  out << j.dump(2) << '\n';
}

/// Resolve the dataset directory: explicit flag first, then MUSIC_DATA_DIR.
std::string resolve_data_dir(const std::string& flag_value) {
  if (!flag_value.empty()) {
    return flag_value;
  }
  if (const char* env = std::getenv("MUSIC_DATA_DIR")) {
    return env;
  }
  throw std::runtime_error(
      "no data directory: pass --data-dir or set MUSIC_DATA_DIR");
}

int report_check(const std::string& what, bool passed) {
  std::cout << (passed ? "[PASS] " : "[FAIL] ") << what << '\n';
  return passed ? 0 : 1;
}

// ---------------------------------------------------------------------------
// Shared MUSIC config plumbing: JSON file + flag overrides
// ---------------------------------------------------------------------------

struct ConfigOverrides {
  std::optional<std::string> config_path;
  std::optional<double> gamma, lambda, eta, trust_value, sigma_z, sigma_b,
      jitter, subsample_p, bandwidth;
  std::optional<int> passes, subsample_k, ring_radius;
  std::optional<std::string> trust_kind, subsample_kind, weight_kind,
      scope_kind;
  std::optional<bool> normalize_rows, distance_targets;
  std::optional<std::uint64_t> seed;
};

void add_config_flags(CLI::App* cmd, ConfigOverrides& ov) {
  cmd->add_option("--config", ov.config_path,
                  "MUSIC config JSON file (flags below override its fields)");
  cmd->add_option("--gamma", ov.gamma, "preservation/attraction balance");
  cmd->add_option("--lambda", ov.lambda, "ridge strength");
  cmd->add_option("--eta", ov.eta, "fractional target reduction per step");
  cmd->add_option("--trust-kind", ov.trust_kind,
                  "trust region kind: absolute | bmu-relative");
  cmd->add_option("--trust-value", ov.trust_value, "trust region size");
  cmd->add_option("--sigma-z", ov.sigma_z, "step noise scale");
  cmd->add_option("--sigma-b", ov.sigma_b, "target noise scale");
  cmd->add_option("--jitter", ov.jitter, "Jacobian row jitter norm");
  cmd->add_option("--passes", ov.passes, "relinearization passes per step");
  cmd->add_option("--subsample-kind", ov.subsample_kind,
                  "cluster subsampling: all | fixed-k | bernoulli-p | "
                  "single-random");
  cmd->add_option("--subsample-k", ov.subsample_k, "fixed-k subset size");
  cmd->add_option("--subsample-p", ov.subsample_p,
                  "bernoulli-p keep probability");
  cmd->add_option("--weight-kind", ov.weight_kind,
                  "row weights: uniform | gaussian-distance");
  cmd->add_option("--weight-bandwidth", ov.bandwidth,
                  "gaussian weight bandwidth (<= 0: block median distance)");
  cmd->add_option("--scope-kind", ov.scope_kind,
                  "preservation scope: all-non-targets | ring");
  cmd->add_option("--ring-radius", ov.ring_radius,
                  "preservation ring radius (lattice rings)");
  cmd->add_option("--normalize-rows", ov.normalize_rows,
                  "normalize Jacobian rows to unit length");
  cmd->add_option("--distance-targets", ov.distance_targets,
                  "use plain-distance target increments (-eta * d_t)");
  cmd->add_option("--seed", ov.seed, "random seed");
}

music::MusicConfig build_config(const ConfigOverrides& ov) {
  music::MusicConfig cfg;
  if (ov.config_path) {
    cfg = music::load_music_config(*ov.config_path);
  }
  if (ov.gamma) cfg.gamma = *ov.gamma;
  if (ov.lambda) cfg.lambda = *ov.lambda;
  if (ov.eta) cfg.eta = *ov.eta;
  if (ov.trust_kind) {
    if (*ov.trust_kind == "absolute") {
      cfg.trust.kind = music::TrustRegion::Kind::Absolute;
    } else if (*ov.trust_kind == "bmu-relative") {
      cfg.trust.kind = music::TrustRegion::Kind::BmuRelative;
    } else {
      throw music::ContractError("unknown trust kind: " + *ov.trust_kind);
    }
  }
  if (ov.trust_value) cfg.trust.value = *ov.trust_value;
  if (ov.sigma_z) cfg.sigma_z = *ov.sigma_z;
  if (ov.sigma_b) cfg.sigma_b = *ov.sigma_b;
  if (ov.jitter) cfg.jitter = *ov.jitter;
  if (ov.passes) cfg.passes = *ov.passes;
  if (ov.subsample_kind) {
    const std::string& k = *ov.subsample_kind;
    if (k == "all") {
      cfg.subsample.kind = music::SubsampleRule::Kind::All;
    } else if (k == "fixed-k") {
      cfg.subsample.kind = music::SubsampleRule::Kind::FixedK;
    } else if (k == "bernoulli-p") {
      cfg.subsample.kind = music::SubsampleRule::Kind::BernoulliP;
    } else if (k == "single-random") {
      cfg.subsample.kind = music::SubsampleRule::Kind::SingleRandom;
    } else {
      throw music::ContractError("unknown subsample kind: " + k);
    }
  }
  if (ov.subsample_k) cfg.subsample.k = *ov.subsample_k;
  if (ov.subsample_p) cfg.subsample.p = *ov.subsample_p;
  if (ov.weight_kind) {
    if (*ov.weight_kind == "uniform") {
      cfg.weight_scheme.kind = music::WeightScheme::Kind::Uniform;
    } else if (*ov.weight_kind == "gaussian-distance") {
      cfg.weight_scheme.kind = music::WeightScheme::Kind::GaussianDistance;
    } else {
      throw music::ContractError("unknown weight kind: " + *ov.weight_kind);
    }
  }
  if (ov.bandwidth) cfg.weight_scheme.bandwidth = *ov.bandwidth;
  if (ov.scope_kind) {
    if (*ov.scope_kind == "all-non-targets") {
      cfg.preserve_scope.kind = music::PreserveScope::Kind::AllNonTargets;
    } else if (*ov.scope_kind == "ring") {
      cfg.preserve_scope.kind = music::PreserveScope::Kind::Ring;
    } else {
      throw music::ContractError("unknown scope kind: " + *ov.scope_kind);
    }
  }
  if (ov.ring_radius) cfg.preserve_scope.ring_radius = *ov.ring_radius;
  if (ov.normalize_rows) cfg.normalize_rows = *ov.normalize_rows;
  if (ov.distance_targets) cfg.distance_targets = *ov.distance_targets;
  if (ov.seed) cfg.seed = *ov.seed;
  cfg.validate();
  return cfg;
}

music::Topology parse_topology(const std::string& name) {
  if (name == "rectangular") {
    return music::Topology::Rectangular;
  }
  if (name == "toroidal") {
    return music::Topology::Toroidal;
  }
  throw music::ContractError("unknown topology: " + name);
}

// ---------------------------------------------------------------------------
// train-som
// ---------------------------------------------------------------------------

struct TrainSomArgs {
  std::string data_path, labels_path, out_path, qe_out;
  int rows = 10, cols = 10;
  std::string topology = "rectangular";
  music::SomTrainConfig config;
  std::string decay = "exponential", init = "random-sample";
};

int run_train_som(const TrainSomArgs& args) {
  const music::Matrix data = read_csv_matrix(args.data_path);
  music::SomTrainConfig tc = args.config;
  if (args.decay == "linear") {
    tc.decay = music::SomTrainConfig::Decay::Linear;
  } else if (args.decay != "exponential") {
    throw music::ContractError("unknown decay: " + args.decay);
  }
  if (args.init == "pca-plane") {
    tc.init = music::SomTrainConfig::Init::PcaPlane;
  } else if (args.init != "random-sample") {
    throw music::ContractError("unknown init: " + args.init);
  }

  std::vector<double> qe;
  music::PrototypeSet som =
      music::train_som(data, args.rows, args.cols,
                       parse_topology(args.topology), tc,
                       args.qe_out.empty() ? nullptr : &qe);
  if (!args.labels_path.empty()) {
    som.labels = music::label_prototypes(som, data, read_label_csv(args.labels_path));
  }
  music::save_prototype_set(args.out_path, som);
  if (!args.qe_out.empty()) {
    std::ofstream out(args.qe_out);
    out << "epoch,quantization_error\n";
    for (std::size_t e = 0; e < qe.size(); ++e) {
      out << e << ',' << qe[e] << '\n';
    }
  }
  std::cout << "trained " << som.units() << " units on " << data.rows()
            << " samples; final quantization error "
            << music::quantization_error(data, som) << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// invert
// ---------------------------------------------------------------------------

struct InvertArgs {
  std::string som_path, activations_path, others, out_path;
  int anchor = -1; // -1: smallest activation per row
  double sigma = 0.0;
};

int run_invert(const InvertArgs& args) {
  const music::PrototypeSet som = music::load_prototype_set(args.som_path);
  const music::Matrix acts = read_csv_matrix(args.activations_path);
  if (acts.cols() != som.units()) {
    throw std::runtime_error("activation CSV must have one column per unit");
  }
  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!args.out_path.empty()) {
    file.open(args.out_path);
    if (!file) {
      throw std::runtime_error("cannot open for writing: " + args.out_path);
    }
    out = &file;
  }
  for (Eigen::Index i = 0; i < acts.rows(); ++i) {
    const music::Vector a = acts.row(i).transpose();
    int anchor = args.anchor;
    if (anchor < 0) {
      Eigen::Index mi = 0;
      a.minCoeff(&mi);
      anchor = static_cast<int>(mi);
    }
    std::vector<int> others;
    if (!args.others.empty()) {
      others = parse_int_list(args.others);
    } else {
      for (int j = 0; j < som.units(); ++j) {
        if (j != anchor) {
          others.push_back(j);
        }
      }
    }
    const music::AnchoredSystem system =
        music::build_anchored_system(som, a, anchor, others);
    music::InversionSolution sol = music::solve_inversion(system);
    if (args.sigma > 0.0) {
      sol.diagnostics = music::noise_diagnostics(system, args.sigma);
    }
    json line;
    line["z"] = std::vector<double>(sol.z.data(), sol.z.data() + sol.z.size());
    line["anchor"] = anchor;
    line["residual"] = sol.residual;
    line["rank"] = sol.diagnostics.rank;
    line["sigma_min"] = sol.diagnostics.sigma_min;
    line["sigma_max"] = sol.diagnostics.sigma_max;
    line["condition"] = sol.diagnostics.condition();
    line["trace_inv"] = sol.diagnostics.trace_inv;
    line["lipschitz_bound"] = sol.diagnostics.lipschitz_bound;
    line["expected_mse"] = sol.diagnostics.expected_mse;
    (*out) << line.dump() << '\n';
  }
  return 0;
}

// ---------------------------------------------------------------------------
// trajectory
// ---------------------------------------------------------------------------

struct TrajectoryArgs {
  std::string som_path, z0_inline, z0_csv, mode = "informed";
  int z0_row = 0;
  int target = 0;
  std::string targets, baseline_units;
  double baseline_step_len = 0.1;
  int steps = 100;
  std::string out_path = "trajectory.csv", manifest_path;
  ConfigOverrides overrides;
};

int run_trajectory_cmd(const TrajectoryArgs& args) {
  const music::PrototypeSet som = music::load_prototype_set(args.som_path);
  music::Vector z0;
  if (!args.z0_inline.empty()) {
    const std::vector<double> v = parse_number_list(args.z0_inline);
    z0 = Eigen::Map<const music::Vector>(v.data(),
                                         static_cast<Eigen::Index>(v.size()));
  } else if (!args.z0_csv.empty()) {
    const music::Matrix pts = read_csv_matrix(args.z0_csv);
    if (args.z0_row < 0 || args.z0_row >= pts.rows()) {
      throw std::runtime_error("--z0-row out of range");
    }
    z0 = pts.row(args.z0_row).transpose();
  } else {
    throw std::runtime_error("pass --z0 or --z0-csv");
  }

  const music::MusicConfig cfg = build_config(args.overrides);
  music::TrajectoryMode mode;
  json mode_details;
  if (args.mode == "free") {
    mode = music::FreeMode{};
  } else if (args.mode == "informed") {
    mode = music::InformedMode{args.target};
    mode_details["target"] = args.target;
  } else if (args.mode == "cluster") {
    music::ClusterMode cm;
    cm.targets = parse_int_list(args.targets);
    mode_details["targets"] = cm.targets;
    mode = cm;
  } else if (args.mode == "baseline") {
    music::BaselineMode bm;
    bm.units = parse_int_list(args.baseline_units);
    bm.step_len = args.baseline_step_len;
    mode_details["units"] = bm.units;
    mode_details["step_len"] = bm.step_len;
    mode = bm;
  } else {
    throw music::ContractError("unknown mode: " + args.mode);
  }

  const music::Trajectory traj =
      music::run_trajectory(z0, som, mode, cfg, args.steps);
  music::write_trajectory_csv(args.out_path, traj);
  if (!args.manifest_path.empty()) {
    json extras;
    extras["steps"] = args.steps;
    extras["mode_details"] = mode_details;
    extras["trajectory_csv"] = args.out_path;
    music::write_manifest(args.manifest_path,
                          music::make_run_manifest(traj.mode, cfg, extras));
  }
  std::cout << "wrote " << traj.step_count() << " steps to " << args.out_path
            << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// metrics
// ---------------------------------------------------------------------------

struct MetricsArgs {
  std::vector<std::string> trajectory_csvs;
  std::string out_path;
};

int run_metrics(const MetricsArgs& args) {
  std::vector<music::TrajectoryMetrics> all;
  all.reserve(args.trajectory_csvs.size());
  for (const auto& path : args.trajectory_csvs) {
    all.push_back(
        music::compute_trajectory_metrics(music::read_trajectory_csv(path)));
  }
  json out;
  if (all.size() == 1) {
    out = music::metrics_to_json(all.front());
  } else {
    out["trajectories"] = all.size();
    out["table"] = music::metrics_table(all);
  }
  if (args.out_path.empty()) {
    std::cout << out.dump(2) << '\n';
  } else {
    write_json_file(args.out_path, out);
  }
  return 0;
}

// ---------------------------------------------------------------------------
// experiment subcommands
// ---------------------------------------------------------------------------

struct FixtureArgs {
  int dim = 10;
  int lattice_rows = 20, lattice_cols = 20;
  int n_train = 25000;
  int epochs = 10;
  std::uint64_t seed = 41;
};

void add_fixture_flags(CLI::App* cmd, FixtureArgs& fx) {
  cmd->add_option("--dim", fx.dim, "mixture dimension");
  cmd->add_option("--lattice-rows", fx.lattice_rows, "SOM rows");
  cmd->add_option("--lattice-cols", fx.lattice_cols, "SOM cols");
  cmd->add_option("--train-samples", fx.n_train, "training sample count");
  cmd->add_option("--epochs", fx.epochs, "SOM training epochs");
  cmd->add_option("--fixture-seed", fx.seed, "fixture seed");
}

music::GmmFixture build_fixture(const FixtureArgs& fx) {
  music::GmmFixtureConfig cfg;
  cfg.dim = fx.dim;
  cfg.lattice_rows = fx.lattice_rows;
  cfg.lattice_cols = fx.lattice_cols;
  cfg.n_train = fx.n_train;
  cfg.epochs = fx.epochs;
  cfg.seed = fx.seed;
  return music::make_gmm_fixture(cfg);
}

struct InversionSweepArgs {
  FixtureArgs fixture;
  int points = 1500;
  std::string n_values = "2,4,6,8,10,12,15,20,30";
  std::string out_path = "inversion_sweep.csv", manifest_path;
  bool check = false;
};

int run_inversion_sweep(const InversionSweepArgs& args) {
  const music::GmmFixture fx = build_fixture(args.fixture);
  const music::GmmSample test =
      music::gmm_sample(fx.spec, args.points, args.fixture.seed + 2);
  const music::Matrix test_points = music::standardize(fx.standardizer, test.data);
  const music::InversionSweepResult result = music::experiment_inversion_vs_n(
      fx.som, test_points, parse_int_list(args.n_values));
  music::write_inversion_sweep_csv(args.out_path, result);
  if (!args.manifest_path.empty()) {
    json m;
    m["version"] = music::kVersion;
    m["experiment"] = "inversion-vs-n";
    m["seed"] = args.fixture.seed;
    m["dim"] = result.dim;
    m["points"] = args.points;
    m["n_values"] = parse_int_list(args.n_values);
    m["csv"] = args.out_path;
    write_json_file(args.manifest_path, m);
  }
  std::cout << "wrote " << result.rows.size() << " sweep rows to "
            << args.out_path << '\n';
  if (args.check) {
    return report_check(
        "inversion sweep: median error < 1e-9 for n >= dim and > 1e-2 for "
        "n <= dim-2",
        result.passes_thresholds());
  }
  return 0;
}

struct NoiseScalingArgs {
  int dim = 10;
  int trials = 20000;
  double sigma = 1e-3;
  std::uint64_t seed = 1234;
  std::string scatter_out = "noise_scatter.csv";
  std::string bins_out = "noise_bins.csv";
  std::string manifest_path;
  bool check = false;
};

int run_noise_scaling(const NoiseScalingArgs& args) {
  const music::NoiseScalingResult result = music::experiment_noise_vs_conditioning(
      args.dim, args.trials, args.sigma, args.seed);
  music::write_noise_scaling_csv(args.scatter_out, args.bins_out, result);
  if (!args.manifest_path.empty()) {
    json m;
    m["version"] = music::kVersion;
    m["experiment"] = "noise-scaling";
    m["seed"] = args.seed;
    m["dim"] = args.dim;
    m["trials"] = args.trials;
    m["sigma"] = args.sigma;
    m["slope"] = result.slope;
    m["max_clean_error"] = result.max_clean_error;
    m["scatter_csv"] = args.scatter_out;
    m["bins_csv"] = args.bins_out;
    write_json_file(args.manifest_path, m);
  }
  std::cout << "log-log slope " << result.slope << ", max clean error "
            << result.max_clean_error << '\n';
  if (args.check) {
    return report_check(
        "noise scaling: slope in [-1.3, -0.7] and clean errors < 1e-9",
        result.passes_thresholds());
  }
  return 0;
}

struct GmmTrajArgs {
  FixtureArgs fixture;
  std::string regime = "both";
  int n_traj = 32;
  int steps = 150;
  std::string out_path = "gmm_trajectories.json";
  bool check = false;
};

int run_gmm_trajectories(const GmmTrajArgs& args) {
  const music::GmmFixture fx = build_fixture(args.fixture);
  json out;
  out["version"] = music::kVersion;
  out["n_traj"] = args.n_traj;
  out["steps"] = args.steps;
  bool passed = true;
  if (args.regime == "both") {
    const music::RegimeComparison cmp =
        music::compare_gmm_regimes(fx, args.n_traj, args.steps);
    out["informed"] = cmp.informed.table;
    out["cluster"] = cmp.cluster.table;
    out["pairs"] = cmp.pairs;
    out["wins_transition_rate"] = cmp.wins_transition_rate;
    out["wins_dwell_median"] = cmp.wins_dwell_median;
    out["wins_geodesic_efficiency"] = cmp.wins_geodesic_efficiency;
    passed = cmp.passes_thresholds();
  } else {
    const music::GmmRegime regime =
        args.regime == "informed" ? music::GmmRegime::InformedConvergence
        : args.regime == "cluster"
            ? music::GmmRegime::ClusterExploration
            : throw music::ContractError("unknown regime: " + args.regime);
    const music::RegimeTrajectoryResult result = music::experiment_gmm_trajectories(
        fx, regime, args.n_traj, args.steps,
        music::gmm_regime_default_config(regime));
    out[args.regime] = result.table;
    if (args.check) {
      throw music::ContractError(
          "--check needs --regime both (paired comparison)");
    }
  }
  write_json_file(args.out_path, out);
  std::cout << "wrote regime table(s) to " << args.out_path << '\n';
  if (args.check) {
    return report_check(
        "regime ordering: informed lower transition rate, higher dwell, "
        "higher efficiency on >= 90% of paired seeds",
        passed);
  }
  return 0;
}

struct MnistTransitionArgs {
  std::string data_dir;
  std::string train_images = "train-images-idx3-ubyte";
  std::string train_labels = "train-labels-idx1-ubyte";
  int lattice_rows = 16, lattice_cols = 16;
  std::string topology = "toroidal";
  int epochs = 6;
  double whiten_eps = 1e-6;
  int max_steps = 500;
  int source_digit = 0;
  int target_digit = 1;
  int target_unit = -1; // -1: first unit labeled target_digit
  std::uint64_t som_seed = 7;
  std::string trajectory_out = "mnist_trajectory.csv";
  std::string curves_out = "mnist_continuity.csv";
  std::string decoded_out;
  std::string manifest_path;
  ConfigOverrides overrides;
  bool check = false;
};

int run_mnist_transition(const MnistTransitionArgs& args) {
  const std::string dir = resolve_data_dir(args.data_dir);
  const music::MnistData train = music::load_mnist_idx(
      dir + "/" + args.train_images, dir + "/" + args.train_labels);

  music::SomTrainConfig tc;
  tc.epochs = args.epochs;
  tc.seed = args.som_seed;
  const music::MnistPipeline pipeline = music::mnist_pipeline_fit(
      train, args.lattice_rows, args.lattice_cols,
      parse_topology(args.topology), tc, args.whiten_eps);

  int source_row = -1;
  for (std::size_t i = 0; i < train.labels.size(); ++i) {
    if (train.labels[i] == args.source_digit) {
      source_row = static_cast<int>(i);
      break;
    }
  }
  if (source_row < 0) {
    throw std::runtime_error("no training image carries the source digit");
  }
  int target_unit = args.target_unit;
  if (target_unit < 0) {
    for (int j = 0; j < pipeline.som.units(); ++j) {
      if (pipeline.som.labels[static_cast<std::size_t>(j)] ==
          args.target_digit) {
        target_unit = j;
        break;
      }
    }
    if (target_unit < 0) {
      throw std::runtime_error("no unit carries the target digit label");
    }
  }

  const music::MusicConfig cfg = build_config(args.overrides);
  const music::MnistTransitionResult result = music::experiment_mnist_transition(
      pipeline.som, pipeline.transform, train.data.row(source_row).transpose(),
      target_unit, cfg, args.max_steps);

  music::write_trajectory_csv(args.trajectory_out, result.trajectory);
  music::write_continuity_curves_csv(args.curves_out, result);
  if (!args.decoded_out.empty()) {
    std::ofstream out(args.decoded_out);
    for (Eigen::Index i = 0; i < result.decoded_states.rows(); ++i) {
      for (Eigen::Index j = 0; j < result.decoded_states.cols(); ++j) {
        out << (j ? "," : "") << result.decoded_states(i, j);
      }
      out << '\n';
    }
  }
  if (!args.manifest_path.empty()) {
    json extras;
    extras["experiment"] = "mnist-transition";
    extras["source_row"] = source_row;
    extras["target_unit"] = target_unit;
    extras["max_steps"] = args.max_steps;
    extras["reached"] = result.reached;
    extras["reach_step"] = result.reach_step;
    extras["median_step_continuity"] = result.median_step_continuity;
    extras["final_global_continuity"] = result.final_global_continuity;
    music::write_manifest(args.manifest_path,
                          music::make_run_manifest("informed", cfg, extras));
  }
  std::cout << (result.reached ? "reached target unit at state "
                               : "did not reach target unit; last state ")
            << (result.reached ? result.reach_step
                               : result.trajectory.step_count())
            << "; median step continuity " << result.median_step_continuity
            << ", final global continuity " << result.final_global_continuity
            << '\n';
  if (args.check) {
    return report_check(
        "digit transition: target cell reached and median local continuity "
        "above final global continuity",
        result.passes_thresholds());
  }
  return 0;
}

struct BaselineCompareArgs {
  FixtureArgs fixture;
  int steps = 50;
  double step_len = 0.05;
  int n_seeds = 50;
  std::uint64_t seed_base = 100;
  std::string out_path = "drift.csv";
  std::string manifest_path;
  bool check = false;
};

int run_baseline_compare(const BaselineCompareArgs& args) {
  const music::GmmFixture fx = build_fixture(args.fixture);
  const music::GmmSample start =
      music::gmm_sample(fx.spec, 1, args.fixture.seed + 3);
  const music::Vector z0 =
      music::standardize(fx.standardizer, music::Vector(start.data.row(0).transpose()));
  std::vector<std::uint64_t> seeds(static_cast<std::size_t>(args.n_seeds));
  for (int i = 0; i < args.n_seeds; ++i) {
    seeds[static_cast<std::size_t>(i)] =
        args.seed_base + static_cast<std::uint64_t>(i);
  }
  const music::BaselineCompareResult result = music::experiment_baseline_comparison(
      z0, fx.som, args.steps, args.step_len, seeds);
  music::write_drift_csv(args.out_path, result);
  if (!args.manifest_path.empty()) {
    json m;
    m["version"] = music::kVersion;
    m["experiment"] = "baseline-compare";
    m["steps"] = args.steps;
    m["step_len"] = args.step_len;
    m["seeds"] = seeds;
    m["wins"] = result.wins;
    m["max_norm_mismatch"] = result.max_norm_mismatch;
    m["csv"] = args.out_path;
    write_json_file(args.manifest_path, m);
  }
  std::cout << "free-mode drift wins " << result.wins << "/" << result.n_seeds
            << " paired seeds; max step-norm mismatch "
            << result.max_norm_mismatch << '\n';
  if (args.check) {
    return report_check(
        "baseline drift: free-mode drift lower on >= 80% of paired seeds at "
        "equal step norms",
        result.passes_thresholds());
  }
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Distance-activation inversion and trajectory control on "
      "self-organizing maps"};
  app.set_version_flag("--version", music::kVersion);
  app.require_subcommand(1);

  // train-som
  TrainSomArgs train_args;
  CLI::App* train = app.add_subcommand("train-som", "Train a map on CSV data");
  train->add_option("--data", train_args.data_path, "numeric CSV, one sample per row")
      ->required();
  train->add_option("--labels", train_args.labels_path,
                    "optional integer label CSV for prototype annotation");
  train->add_option("--rows", train_args.rows, "lattice rows");
  train->add_option("--cols", train_args.cols, "lattice cols");
  train->add_option("--topology", train_args.topology,
                    "rectangular | toroidal");
  train->add_option("--epochs", train_args.config.epochs, "training epochs");
  train->add_option("--rate-initial", train_args.config.rate_initial);
  train->add_option("--rate-final", train_args.config.rate_final);
  train->add_option("--radius-initial", train_args.config.radius_initial);
  train->add_option("--radius-final", train_args.config.radius_final);
  train->add_option("--decay", train_args.decay, "exponential | linear");
  train->add_option("--init", train_args.init, "random-sample | pca-plane");
  train->add_option("--seed", train_args.config.seed);
  train->add_option("--out", train_args.out_path, "output PrototypeSet JSON")
      ->required();
  train->add_option("--qe-out", train_args.qe_out,
                    "per-epoch quantization error CSV");

  // invert
  InvertArgs invert_args;
  CLI::App* invert =
      app.add_subcommand("invert", "Invert activation vectors to points");
  invert->add_option("--som", invert_args.som_path, "PrototypeSet JSON")
      ->required();
  invert
      ->add_option("--activations", invert_args.activations_path,
                   "CSV, one activation vector per row (one column per unit)")
      ->required();
  invert->add_option("--anchor", invert_args.anchor,
                     "anchor unit (-1: per-row smallest activation)");
  invert->add_option("--others", invert_args.others,
                     "comma-separated row units (default: all non-anchor)");
  invert->add_option("--sigma", invert_args.sigma,
                     "activation noise scale for the diagnostics");
  invert->add_option("--out", invert_args.out_path,
                     "output JSON-lines path (default: stdout)");

  // trajectory
  TrajectoryArgs traj_args;
  CLI::App* traj = app.add_subcommand("trajectory", "Run one MUSIC trajectory");
  traj->add_option("--som", traj_args.som_path, "PrototypeSet JSON")->required();
  traj->add_option("--z0", traj_args.z0_inline, "start point, comma-separated");
  traj->add_option("--z0-csv", traj_args.z0_csv, "CSV holding start points");
  traj->add_option("--z0-row", traj_args.z0_row, "row in --z0-csv");
  traj->add_option("--mode", traj_args.mode,
                   "free | informed | cluster | baseline");
  traj->add_option("--target", traj_args.target, "informed target unit");
  traj->add_option("--targets", traj_args.targets,
                   "cluster target units, comma-separated");
  traj->add_option("--baseline-units", traj_args.baseline_units,
                   "baseline unit sequence, comma-separated");
  traj->add_option("--baseline-step-len", traj_args.baseline_step_len);
  traj->add_option("--steps", traj_args.steps, "outer steps");
  traj->add_option("--out", traj_args.out_path, "trajectory CSV");
  traj->add_option("--manifest", traj_args.manifest_path, "run manifest JSON");
  add_config_flags(traj, traj_args.overrides);

  // metrics
  MetricsArgs metrics_args;
  CLI::App* metrics =
      app.add_subcommand("metrics", "Compute trajectory metrics from CSV");
  metrics
      ->add_option("trajectories", metrics_args.trajectory_csvs,
                   "trajectory CSV files (2+ aggregate into a table)")
      ->required();
  metrics->add_option("--out", metrics_args.out_path,
                      "output JSON (default: stdout)");

  // experiment
  CLI::App* exp = app.add_subcommand("experiment", "Desk-scale experiments");
  exp->require_subcommand(1);

  InversionSweepArgs sweep_args;
  CLI::App* sweep = exp->add_subcommand(
      "inversion-vs-n", "Reconstruction error vs anchored-system row count");
  add_fixture_flags(sweep, sweep_args.fixture);
  sweep->add_option("--points", sweep_args.points, "test point count");
  sweep->add_option("--n-values", sweep_args.n_values,
                    "comma-separated row counts");
  sweep->add_option("--out", sweep_args.out_path, "sweep CSV");
  sweep->add_option("--manifest", sweep_args.manifest_path);
  sweep->add_flag("--check", sweep_args.check, "exit 0 only if thresholds pass");

  NoiseScalingArgs noise_args;
  CLI::App* noise = exp->add_subcommand(
      "noise-scaling", "Reconstruction error vs conditioning under noise");
  noise->add_option("--dim", noise_args.dim);
  noise->add_option("--trials", noise_args.trials);
  noise->add_option("--sigma", noise_args.sigma);
  noise->add_option("--seed", noise_args.seed);
  noise->add_option("--scatter-out", noise_args.scatter_out);
  noise->add_option("--bins-out", noise_args.bins_out);
  noise->add_option("--manifest", noise_args.manifest_path);
  noise->add_flag("--check", noise_args.check);

  GmmTrajArgs gmm_args;
  CLI::App* gmm = exp->add_subcommand(
      "gmm-trajectories", "Regime metrics on the triangle mixture");
  add_fixture_flags(gmm, gmm_args.fixture);
  gmm->add_option("--regime", gmm_args.regime, "informed | cluster | both");
  gmm->add_option("--n-traj", gmm_args.n_traj);
  gmm->add_option("--steps", gmm_args.steps);
  gmm->add_option("--out", gmm_args.out_path, "metrics table JSON");
  gmm->add_flag("--check", gmm_args.check);

  MnistTransitionArgs mnist_args;
  CLI::App* mnist = exp->add_subcommand(
      "mnist-transition", "Digit-to-digit informed run in whitened space");
  mnist->add_option("--data-dir", mnist_args.data_dir,
                    "IDX dataset directory (default: $MUSIC_DATA_DIR)");
  mnist->add_option("--train-images", mnist_args.train_images,
                    "image file name inside the data directory");
  mnist->add_option("--train-labels", mnist_args.train_labels,
                    "label file name inside the data directory");
  mnist->add_option("--lattice-rows", mnist_args.lattice_rows);
  mnist->add_option("--lattice-cols", mnist_args.lattice_cols);
  mnist->add_option("--topology", mnist_args.topology);
  mnist->add_option("--epochs", mnist_args.epochs);
  mnist->add_option("--whiten-eps", mnist_args.whiten_eps);
  mnist->add_option("--max-steps", mnist_args.max_steps);
  mnist->add_option("--source-digit", mnist_args.source_digit);
  mnist->add_option("--target-digit", mnist_args.target_digit);
  mnist->add_option("--target-unit", mnist_args.target_unit,
                    "explicit target unit (-1: first unit labeled "
                    "--target-digit)");
  mnist->add_option("--som-seed", mnist_args.som_seed);
  mnist->add_option("--trajectory-out", mnist_args.trajectory_out);
  mnist->add_option("--curves-out", mnist_args.curves_out);
  mnist->add_option("--decoded-out", mnist_args.decoded_out,
                    "decoded pixel-space states CSV");
  mnist->add_option("--manifest", mnist_args.manifest_path);
  add_config_flags(mnist, mnist_args.overrides);
  mnist->add_flag("--check", mnist_args.check);

  BaselineCompareArgs base_args;
  CLI::App* base = exp->add_subcommand(
      "baseline-compare", "Preserved-activation drift vs radial baseline");
  add_fixture_flags(base, base_args.fixture);
  base->add_option("--steps", base_args.steps);
  base->add_option("--step-len", base_args.step_len);
  base->add_option("--n-seeds", base_args.n_seeds);
  base->add_option("--seed-base", base_args.seed_base);
  base->add_option("--out", base_args.out_path, "drift CSV");
  base->add_option("--manifest", base_args.manifest_path);
  base->add_flag("--check", base_args.check);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train) return run_train_som(train_args);
    if (*invert) return run_invert(invert_args);
    if (*traj) return run_trajectory_cmd(traj_args);
    if (*metrics) return run_metrics(metrics_args);
    if (*sweep) return run_inversion_sweep(sweep_args);
    if (*noise) return run_noise_scaling(noise_args);
    if (*gmm) return run_gmm_trajectories(gmm_args);
    if (*mnist) return run_mnist_transition(mnist_args);
    if (*base) return run_baseline_compare(base_args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
