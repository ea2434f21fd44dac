#include "music/config_io.hpp"
#include "music/metrics.hpp"
#include "music/som_io.hpp"
#include "music/trajectory_io.hpp"
#include "music/version.hpp"
#include "test_helpers.hpp"

#include <doctest.h>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

using music::ContractError;
using music::MusicConfig;
using music::PreserveScope;
using music::PrototypeSet;
using music::Rng;
using music::SubsampleRule;
using music::Topology;
using music::TrustRegion;
using music::Vector;
using music::WeightScheme;
using nlohmann::json;
using testsupport::random_matrix;
using testsupport::random_vector;

namespace {

namespace fs = std::filesystem;

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("music_io_" + std::to_string(std::chrono::steady_clock::now()
                                             .time_since_epoch()
                                             .count()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
};

PrototypeSet awkward_som() {
  Rng rng(1);
  PrototypeSet som;
  som.lattice_rows = 2;
  som.lattice_cols = 3;
  som.topology = Topology::Toroidal;
  som.weights = random_matrix(6, 3, rng);
  som.weights(0, 0) = 1.0 / 3.0; // not exactly representable in decimal
  som.weights(1, 1) = std::sqrt(2.0);
  som.weights(2, 2) = -1e-17;
  som.labels = {0, 1, 2, -1, 1, 0};
  return som;
}

} // namespace

// ---------------------------------------------------------------------------
// Prototype-set JSON
// ---------------------------------------------------------------------------

TEST_CASE("prototype sets survive a save/load cycle bit for bit") {
  TempDir dir;
  const auto som = awkward_som();
  const std::string path = dir.file("som.json");
  music::save_prototype_set(path, som);
  const auto back = music::load_prototype_set(path);

  CHECK(back.lattice_rows == 2);
  CHECK(back.lattice_cols == 3);
  CHECK(back.topology == Topology::Toroidal);
  REQUIRE(back.weights.rows() == 6);
  REQUIRE(back.weights.cols() == 3);
  CHECK((back.weights - som.weights).cwiseAbs().maxCoeff() == 0.0);
  CHECK(back.labels == som.labels);
}

TEST_CASE("unlabeled prototype sets round-trip with empty labels") {
  auto som = awkward_som();
  som.labels.clear();
  json j = som;
  CHECK_FALSE(j.contains("labels"));
  const auto back = j.get<PrototypeSet>();
  CHECK(back.labels.empty());
  CHECK((back.weights - som.weights).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("prototype-set serialization rejects malformed inputs") {
  SUBCASE("non-finite weights") {
    auto som = awkward_som();
    som.weights(3, 1) = std::nan("");
    json j;
    CHECK_THROWS_AS(music::to_json(j, som), ContractError);
  }
  SUBCASE("lattice size mismatch") {
    auto som = awkward_som();
    som.lattice_cols = 4;
    json j;
    CHECK_THROWS_AS(music::to_json(j, som), ContractError);
  }
  SUBCASE("label count mismatch") {
    auto som = awkward_som();
    som.labels.pop_back();
    json j;
    CHECK_THROWS_AS(music::to_json(j, som), ContractError);
  }
}

TEST_CASE("prototype-set parsing rejects malformed documents") {
  json good = awkward_som();
  SUBCASE("wrong format field") {
    json j = good;
    j["format"] = "something-else";
    CHECK_THROWS_AS(j.get<PrototypeSet>(), ContractError);
  }
  SUBCASE("unknown topology") {
    json j = good;
    j["topology"] = "hexagonal";
    CHECK_THROWS_AS(j.get<PrototypeSet>(), ContractError);
  }
  SUBCASE("weight array size mismatch") {
    json j = good;
    auto flat = j["weights"].get<std::vector<double>>();
    flat.pop_back();
    j["weights"] = flat;
    CHECK_THROWS_AS(j.get<PrototypeSet>(), ContractError);
  }
  SUBCASE("label count mismatch") {
    json j = good;
    j["labels"] = std::vector<int>{1, 2};
    CHECK_THROWS_AS(j.get<PrototypeSet>(), ContractError);
  }
  SUBCASE("non-positive dimensions") {
    json j = good;
    j["lattice_rows"] = 0;
    CHECK_THROWS_AS(j.get<PrototypeSet>(), ContractError);
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(music::load_prototype_set("/nonexistent/som.json"),
                    std::runtime_error);
  }
}

// ---------------------------------------------------------------------------
// Update-rule config JSON
// ---------------------------------------------------------------------------

TEST_CASE("default configs round-trip through JSON") {
  const MusicConfig cfg;
  json j = cfg;
  const auto back = j.get<MusicConfig>();
  CHECK(back.gamma == cfg.gamma);
  CHECK(back.lambda == cfg.lambda);
  CHECK(back.eta == cfg.eta);
  CHECK(back.trust.kind == cfg.trust.kind);
  CHECK(back.trust.value == cfg.trust.value);
  CHECK(back.sigma_z == cfg.sigma_z);
  CHECK(back.sigma_b == cfg.sigma_b);
  CHECK(back.jitter == cfg.jitter);
  CHECK(back.passes == cfg.passes);
  CHECK(back.subsample.kind == cfg.subsample.kind);
  CHECK(back.normalize_rows == cfg.normalize_rows);
  CHECK(back.distance_targets == cfg.distance_targets);
  CHECK(back.seed == cfg.seed);
}

TEST_CASE("every non-default config field round-trips") {
  MusicConfig cfg;
  cfg.gamma = 0.6;
  cfg.lambda = 3e-3;
  cfg.eta = 0.11;
  cfg.trust.kind = TrustRegion::Kind::Absolute;
  cfg.trust.value = 0.4;
  cfg.sigma_z = 0.01;
  cfg.sigma_b = 0.02;
  cfg.jitter = 0.03;
  cfg.passes = 4;
  cfg.subsample.kind = SubsampleRule::Kind::FixedK;
  cfg.subsample.k = 3;
  cfg.subsample.p = 0.25;
  cfg.weight_scheme.kind = WeightScheme::Kind::GaussianDistance;
  cfg.weight_scheme.bandwidth = 1.5;
  cfg.preserve_scope.kind = PreserveScope::Kind::Ring;
  cfg.preserve_scope.ring_radius = 2;
  cfg.normalize_rows = false;
  cfg.distance_targets = true;
  cfg.seed = 123;

  const json j = cfg;
  const auto back = j.get<MusicConfig>();
  CHECK(back.gamma == cfg.gamma);
  CHECK(back.lambda == cfg.lambda);
  CHECK(back.eta == cfg.eta);
  CHECK(back.trust.kind == TrustRegion::Kind::Absolute);
  CHECK(back.trust.value == cfg.trust.value);
  CHECK(back.sigma_z == cfg.sigma_z);
  CHECK(back.sigma_b == cfg.sigma_b);
  CHECK(back.jitter == cfg.jitter);
  CHECK(back.passes == 4);
  CHECK(back.subsample.kind == SubsampleRule::Kind::FixedK);
  CHECK(back.subsample.k == 3);
  CHECK(back.subsample.p == 0.25);
  CHECK(back.weight_scheme.kind == WeightScheme::Kind::GaussianDistance);
  CHECK(back.weight_scheme.bandwidth == 1.5);
  CHECK(back.preserve_scope.kind == PreserveScope::Kind::Ring);
  CHECK(back.preserve_scope.ring_radius == 2);
  CHECK(back.normalize_rows == false);
  CHECK(back.distance_targets == true);
  CHECK(back.seed == 123);
}

TEST_CASE("partial config documents override only their keys") {
  const json j{{"gamma", 0.5}};
  const auto cfg = j.get<MusicConfig>();
  const MusicConfig defaults;
  CHECK(cfg.gamma == 0.5);
  CHECK(cfg.lambda == defaults.lambda);
  CHECK(cfg.eta == defaults.eta);
  CHECK(cfg.trust.value == defaults.trust.value);
  CHECK(cfg.seed == defaults.seed);
}

TEST_CASE("config parsing rejects unknown enum names and invalid values") {
  SUBCASE("unknown trust kind") {
    const json j{{"trust", {{"kind", "diagonal"}}}};
    CHECK_THROWS_WITH_AS(j.get<MusicConfig>(),
                         "config: unknown trust kind 'diagonal'",
                         ContractError);
  }
  SUBCASE("unknown subsample kind") {
    const json j{{"subsample", {{"kind", "pairs"}}}};
    CHECK_THROWS_AS(j.get<MusicConfig>(), ContractError);
  }
  SUBCASE("unknown weight kind") {
    const json j{{"weight_scheme", {{"kind", "cubic"}}}};
    CHECK_THROWS_AS(j.get<MusicConfig>(), ContractError);
  }
  SUBCASE("unknown scope kind") {
    const json j{{"preserve_scope", {{"kind", "everything"}}}};
    CHECK_THROWS_AS(j.get<MusicConfig>(), ContractError);
  }
  SUBCASE("out-of-range values fail validation on parse") {
    const json j{{"lambda", 0.0}};
    CHECK_THROWS_AS(j.get<MusicConfig>(), ContractError);
  }
}

TEST_CASE("configs load from files") {
  TempDir dir;
  const std::string path = dir.file("config.json");
  std::ofstream(path) << R"({"eta": 0.1, "seed": 9})";
  const auto cfg = music::load_music_config(path);
  CHECK(cfg.eta == 0.1);
  CHECK(cfg.seed == 9);
  CHECK_THROWS_AS(music::load_music_config(dir.file("missing.json")),
                  std::runtime_error);
}

// ---------------------------------------------------------------------------
// Trajectory CSV + manifest
// ---------------------------------------------------------------------------

TEST_CASE("trajectory CSVs round-trip states and BMUs exactly") {
  TempDir dir;
  Rng rng(2);
  const auto som = testsupport::random_som(8, 4, rng, 2.0);
  const Vector z0 = random_vector(4, rng);
  MusicConfig cfg;
  cfg.sigma_z = 0.02; // irrational-looking doubles in every state
  cfg.seed = 5;
  const auto traj =
      music::run_trajectory(z0, som, music::InformedMode{3}, cfg, 5);

  const std::string path = dir.file("traj.csv");
  music::write_trajectory_csv(path, traj);

  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "step,z0,z1,z2,z3,bmu,dz_norm,targets");

  const auto data = music::read_trajectory_csv(path);
  REQUIRE(data.states.size() == traj.states.size());
  for (size_t t = 0; t < data.states.size(); ++t) {
    CHECK((data.states[t] - traj.states[t]).cwiseAbs().maxCoeff() == 0.0);
    CHECK(data.bmus[t] == traj.bmu_per_state[t]);
  }
}

TEST_CASE("trajectory CSV IO rejects malformed inputs") {
  TempDir dir;
  CHECK_THROWS_AS(music::write_trajectory_csv(dir.file("t.csv"),
                                              music::Trajectory{}),
                  ContractError);
  CHECK_THROWS_AS(music::read_trajectory_csv(dir.file("missing.csv")),
                  std::runtime_error);
  const std::string bad = dir.file("bad.csv");
  std::ofstream(bad) << "time,a,b\n1,2,3\n";
  CHECK_THROWS_AS(music::read_trajectory_csv(bad), std::runtime_error);
  const std::string empty = dir.file("empty.csv");
  std::ofstream(empty) << "step,z0,bmu,dz_norm,targets\n";
  CHECK_THROWS_AS(music::read_trajectory_csv(empty), std::runtime_error);
}

TEST_CASE("run manifests carry version, mode, seed, config, and extras") {
  MusicConfig cfg;
  cfg.seed = 77;
  const json manifest =
      music::make_run_manifest("informed", cfg, {{"steps", 100}});
  CHECK(manifest["version"] == music::kVersion);
  CHECK(manifest["mode"] == "informed");
  CHECK(manifest["seed"] == 77);
  CHECK(manifest["config"]["gamma"] == cfg.gamma);
  CHECK(manifest["steps"] == 100);

  TempDir dir;
  const std::string path = dir.file("manifest.json");
  music::write_manifest(path, manifest);
  std::ifstream in(path);
  json back;
  in >> back;
  CHECK(back == manifest);
}

TEST_CASE("metric bundles serialize every field and flag") {
  const auto traj = testsupport::traj_from_steps(
      2, {testsupport::vec({1.0, 0.0}), testsupport::vec({0.0, 1.0})},
      {0, 0, 1});
  const auto m = music::compute_trajectory_metrics(traj);
  const json j = music::metrics_to_json(m);
  for (const std::string key :
       {"step_continuity", "global_continuity", "transition_rate",
        "dwell_lengths", "dwell_median", "dwell_iqr", "curvature_within",
        "curvature_trans", "geodesic_efficiency", "segment_means",
        "segmented_median", "segmented_iqr", "flags"}) {
    CHECK(j.contains(key));
  }
  for (const std::string flag :
       {"no_nonzero_steps", "zero_initial_step", "no_within_curvature",
        "no_transition_curvature", "zero_path_length",
        "no_multi_step_segment"}) {
    CHECK(j["flags"].contains(flag));
  }
  CHECK(j["transition_rate"].get<double>() == 0.5);
  CHECK(j["dwell_lengths"].get<std::vector<int>>() ==
        std::vector<int>{2, 1});
}
