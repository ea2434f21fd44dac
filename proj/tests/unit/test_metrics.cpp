#include "music/metrics.hpp"
#include "test_helpers.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <vector>

using music::ContractError;
using music::Rng;
using music::TrajectoryData;
using music::Vector;
using testsupport::make_traj;
using testsupport::random_vector;
using testsupport::traj_from_steps;
using testsupport::vec;

namespace {

Vector unit(int dim, int axis, double scale = 1.0) {
  Vector v = Vector::Zero(dim);
  v[axis] = scale;
  return v;
}

} // namespace

// ---------------------------------------------------------------------------
// step continuity
// ---------------------------------------------------------------------------

TEST_CASE("collinear steps have continuity exactly one") {
  const auto traj = traj_from_steps(
      2, {unit(2, 0), unit(2, 0, 2.0), unit(2, 0, 0.5)});
  const auto sc = music::step_continuity(traj);
  REQUIRE(sc.values.size() == 2);
  for (double c : sc.values) CHECK(c == 1.0);
  CHECK_FALSE(sc.flagged);
}

TEST_CASE("alternating directions have continuity exactly minus one") {
  const auto traj = traj_from_steps(
      2, {unit(2, 0), unit(2, 0, -1.0), unit(2, 0), unit(2, 0, -1.0)});
  const auto sc = music::step_continuity(traj);
  REQUIRE(sc.values.size() == 3);
  for (double c : sc.values) CHECK(c == -1.0);
}

TEST_CASE("a right-angle turn has continuity zero") {
  const auto traj = traj_from_steps(2, {unit(2, 0), unit(2, 1)});
  const auto sc = music::step_continuity(traj);
  REQUIRE(sc.values.size() == 1);
  CHECK(sc.values[0] == 0.0);
}

TEST_CASE("zero-length steps are dropped from the continuity series") {
  const auto traj = traj_from_steps(
      2, {unit(2, 0), Vector::Zero(2), unit(2, 0)});
  const auto sc = music::step_continuity(traj);
  REQUIRE(sc.values.size() == 1); // two nonzero steps -> one pair
  CHECK(sc.values[0] == 1.0);
  CHECK_FALSE(sc.flagged);
}

TEST_CASE("stationary trajectories flag an empty continuity series") {
  const Vector z = vec({1.0, 2.0});
  const auto traj = make_traj({z, z, z});
  const auto sc = music::step_continuity(traj);
  CHECK(sc.values.empty());
  CHECK(sc.flagged);
}

TEST_CASE("step continuity requires at least two raw steps") {
  CHECK_THROWS_AS(
      music::step_continuity(traj_from_steps(2, {unit(2, 0)})),
      ContractError);
}

// ---------------------------------------------------------------------------
// global continuity
// ---------------------------------------------------------------------------

TEST_CASE("a u-turn flips the global continuity sign") {
  std::vector<Vector> steps;
  for (int i = 0; i < 3; ++i) steps.push_back(unit(2, 0));
  for (int i = 0; i < 3; ++i) steps.push_back(unit(2, 0, -1.0));
  const auto gc = music::global_continuity(traj_from_steps(2, steps));
  REQUIRE(gc.values.size() == 6);
  for (int i = 0; i < 3; ++i) CHECK(gc.values[static_cast<size_t>(i)] == 1.0);
  for (int i = 3; i < 6; ++i) CHECK(gc.values[static_cast<size_t>(i)] == -1.0);
  CHECK_FALSE(gc.flagged);
}

TEST_CASE("a quarter circle decays monotonically toward zero") {
  const int n = 20;
  std::vector<Vector> states;
  for (int k = 0; k <= n; ++k) {
    const double theta = 0.5 * M_PI * static_cast<double>(k) / n;
    states.push_back(vec({std::cos(theta), std::sin(theta)}));
  }
  const auto gc = music::global_continuity(make_traj(std::move(states)));
  REQUIRE(gc.values.size() == static_cast<size_t>(n));
  CHECK(gc.values[0] == doctest::Approx(1.0).epsilon(1e-12));
  for (size_t i = 1; i < gc.values.size(); ++i) {
    CHECK(gc.values[i] < gc.values[i - 1]);
    CHECK(gc.values[i] >= 0.0);
  }
  CHECK(gc.values.back() < 0.2);
}

TEST_CASE("a zero-length first step re-bases the global reference") {
  const auto traj =
      traj_from_steps(2, {Vector::Zero(2), unit(2, 0), unit(2, 1)});
  const auto gc = music::global_continuity(traj);
  CHECK(gc.flagged); // callers are told the reference moved
  REQUIRE(gc.values.size() == 2);
  CHECK(gc.values[0] == 1.0);
  CHECK(gc.values[1] == 0.0);
}

TEST_CASE("global continuity needs at least one step") {
  CHECK_THROWS_AS(music::global_continuity(make_traj({vec({0.0})})),
                  ContractError);
  const Vector z = vec({1.0});
  const auto gc = music::global_continuity(make_traj({z, z}));
  CHECK(gc.values.empty());
  CHECK(gc.flagged);
}

// ---------------------------------------------------------------------------
// transition rate and dwell statistics
// ---------------------------------------------------------------------------

TEST_CASE("transition rate counts BMU changes per step") {
  auto steps3 = std::vector<Vector>{unit(2, 0), unit(2, 0), unit(2, 0)};
  CHECK(music::transition_rate(traj_from_steps(2, steps3, {1, 1, 1, 1})) ==
        0.0);
  CHECK(music::transition_rate(traj_from_steps(2, steps3, {1, 2, 3, 4})) ==
        1.0);
  CHECK(music::transition_rate(traj_from_steps(2, steps3, {1, 1, 2, 2})) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(music::transition_rate(make_traj({vec({0.0})})) == 0.0);
}

TEST_CASE("dwell lengths are the maximal constant-BMU runs") {
  auto steps2 = std::vector<Vector>{unit(2, 0), unit(2, 0)};
  const auto stats = music::dwell_stats(traj_from_steps(2, steps2, {1, 1, 2}));
  CHECK(stats.lengths == std::vector<int>{2, 1});
  CHECK(stats.median == 1.5);
  CHECK(stats.iqr == doctest::Approx(0.5).epsilon(1e-15));

  SUBCASE("a single BMU dwells for the whole trajectory") {
    const int T = 7;
    std::vector<Vector> steps(T, unit(2, 0));
    const auto s = music::dwell_stats(traj_from_steps(2, steps));
    CHECK(s.lengths == std::vector<int>{T + 1});
  }
  SUBCASE("alternating BMUs dwell for one state each") {
    auto s = music::dwell_stats(
        traj_from_steps(2, {unit(2, 0), unit(2, 0), unit(2, 0)},
                        {0, 1, 0, 1}));
    CHECK(s.lengths == std::vector<int>(4, 1));
    CHECK(s.median == 1.0);
    CHECK(s.iqr == 0.0);
  }
  SUBCASE("lengths always sum to the state count") {
    Rng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
      const int n = 2 + static_cast<int>(rng() % 30u);
      std::vector<Vector> steps(static_cast<size_t>(n - 1), unit(2, 0));
      std::vector<int> bmus;
      for (int i = 0; i < n; ++i)
        bmus.push_back(static_cast<int>(rng() % 3u));
      const auto s = music::dwell_stats(traj_from_steps(2, steps, bmus));
      CHECK(std::accumulate(s.lengths.begin(), s.lengths.end(), 0) == n);
    }
  }
}

TEST_CASE("run count, transition count, and rate agree") {
  Rng rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 40u);
    std::vector<Vector> steps(static_cast<size_t>(n - 1), unit(2, 0));
    std::vector<int> bmus;
    for (int i = 0; i < n; ++i) bmus.push_back(static_cast<int>(rng() % 4u));
    const auto traj = traj_from_steps(2, steps, bmus);
    const auto dwell = music::dwell_stats(traj);
    const double rate = music::transition_rate(traj);
    const int transitions = static_cast<int>(dwell.lengths.size()) - 1;
    CHECK(static_cast<double>(transitions) ==
          doctest::Approx(rate * (n - 1)).epsilon(1e-12));
  }
}

// ---------------------------------------------------------------------------
// curvature
// ---------------------------------------------------------------------------

TEST_CASE("straight motion has zero curvature") {
  const auto traj =
      traj_from_steps(2, {unit(2, 0), unit(2, 0), unit(2, 0)});
  const auto stats = music::curvature(traj);
  CHECK(stats.within_median == 0.0);
  CHECK_FALSE(stats.within_flagged);
  CHECK(stats.trans_flagged); // no BMU change anywhere
  CHECK(std::isnan(stats.trans_median));
}

TEST_CASE("a right angle at half-unit steps curves at pi per unit") {
  const auto traj =
      traj_from_steps(2, {unit(2, 0, 0.5), unit(2, 1, 0.5)});
  const auto stats = music::curvature(traj);
  CHECK(std::abs(stats.within_median - M_PI) < 1e-15);
}

TEST_CASE("pairs are classified by the BMU change of their first step") {
  // First step leaves cell 0 and lands in cell 1 -> its pair is transition;
  // second pair starts inside cell 1 -> within.
  const auto traj = traj_from_steps(
      2, {unit(2, 0), unit(2, 1), unit(2, 0)}, {0, 1, 1, 1});
  const auto stats = music::curvature(traj);
  CHECK_FALSE(stats.trans_flagged);
  CHECK_FALSE(stats.within_flagged);
  const double kappa = std::acos(0.0) / 1.0;
  CHECK(stats.trans_median == doctest::Approx(kappa).epsilon(1e-15));
  CHECK(stats.within_median == doctest::Approx(kappa).epsilon(1e-15));
}

TEST_CASE("curvature requires two nonzero steps") {
  CHECK_THROWS_AS(
      music::curvature(traj_from_steps(
          2, {unit(2, 0), Vector::Zero(2), Vector::Zero(2)})),
      ContractError);
}

// ---------------------------------------------------------------------------
// geodesic efficiency
// ---------------------------------------------------------------------------

TEST_CASE("geodesic efficiency grades path directness") {
  SUBCASE("straight paths are perfectly efficient") {
    const auto eff = music::geodesic_efficiency(
        traj_from_steps(2, {unit(2, 0), unit(2, 0), unit(2, 0)}));
    CHECK(eff.value == 1.0);
    CHECK_FALSE(eff.flagged);
  }
  SUBCASE("an L-shaped detour scores sqrt(2)/2") {
    const auto eff = music::geodesic_efficiency(
        traj_from_steps(2, {unit(2, 0), unit(2, 1)}));
    CHECK(eff.value == doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-15));
  }
  SUBCASE("closed loops score zero without flagging") {
    const auto eff = music::geodesic_efficiency(traj_from_steps(
        2, {unit(2, 0), unit(2, 1), unit(2, 0, -1.0), unit(2, 1, -1.0)}));
    CHECK(eff.value == 0.0);
    CHECK_FALSE(eff.flagged);
  }
  SUBCASE("zero total path length is flagged") {
    const Vector z = vec({3.0, -1.0});
    const auto eff = music::geodesic_efficiency(make_traj({z, z, z}));
    CHECK(std::isnan(eff.value));
    CHECK(eff.flagged);
  }
}

// ---------------------------------------------------------------------------
// segmented continuity
// ---------------------------------------------------------------------------

TEST_CASE("segments are scored by their interior step cosines") {
  SUBCASE("one straight dwell segment scores one") {
    const auto seg = music::segmented_continuity(
        traj_from_steps(2, {unit(2, 0), unit(2, 0), unit(2, 0)}));
    CHECK(seg.segment_means == std::vector<double>{1.0});
    CHECK(seg.median == 1.0);
    CHECK_FALSE(seg.flagged);
  }
  SUBCASE("straight and zigzag segments score one and minus one") {
    // States 0-3 dwell in cell 0 moving straight; states 4-7 dwell in cell 1
    // zigzagging. The crossing step 3->4 belongs to neither segment.
    std::vector<Vector> steps{unit(2, 0),        unit(2, 0), unit(2, 0),
                              unit(2, 0),        unit(2, 1), unit(2, 1, -1.0),
                              unit(2, 1)};
    std::vector<int> bmus{0, 0, 0, 0, 1, 1, 1, 1};
    const auto seg =
        music::segmented_continuity(traj_from_steps(2, steps, bmus));
    REQUIRE(seg.segment_means.size() == 2);
    CHECK(seg.segment_means[0] == 1.0);
    CHECK(seg.segment_means[1] == -1.0);
    CHECK(seg.median == 0.0);
    CHECK(seg.iqr == doctest::Approx(1.0).epsilon(1e-15));
  }
  SUBCASE("a long random walk in one cell has near-zero mean cosine") {
    Rng rng(7);
    std::vector<Vector> steps;
    for (int t = 0; t < 1000; ++t) steps.push_back(random_vector(10, rng));
    const auto seg = music::segmented_continuity(traj_from_steps(10, steps));
    REQUIRE(seg.segment_means.size() == 1);
    CHECK(std::abs(seg.segment_means[0]) < 0.2);
  }
  SUBCASE("no segment with two interior steps flags the result") {
    // Every dwell lasts a single state, so no segment qualifies.
    const auto seg = music::segmented_continuity(traj_from_steps(
        2, {unit(2, 0), unit(2, 1), unit(2, 0)}, {0, 1, 2, 3}));
    CHECK(seg.segment_means.empty());
    CHECK(seg.flagged);
    CHECK(std::isnan(seg.median));
    CHECK(std::isnan(seg.iqr));
  }
}

// ---------------------------------------------------------------------------
// scale invariance and the metric bundle
// ---------------------------------------------------------------------------

namespace {

TrajectoryData random_labeled_walk(int dim, int steps, unsigned seed) {
  Rng rng(seed);
  std::vector<Vector> deltas;
  std::vector<int> bmus{0};
  for (int t = 0; t < steps; ++t) {
    deltas.push_back(random_vector(dim, rng));
    bmus.push_back(static_cast<int>(rng() % 3u));
  }
  return traj_from_steps(dim, deltas, bmus);
}

TrajectoryData scaled(const TrajectoryData& traj, double s) {
  TrajectoryData out = traj;
  for (auto& z : out.states) z *= s;
  return out;
}

} // namespace

TEST_CASE("unitless metrics are invariant under uniform scaling") {
  const auto traj = random_labeled_walk(4, 60, 11);
  const double s = 3.7;
  const auto big = scaled(traj, s);

  const auto m1 = music::compute_trajectory_metrics(traj);
  const auto m2 = music::compute_trajectory_metrics(big);

  REQUIRE(m1.step_continuity.size() == m2.step_continuity.size());
  for (size_t i = 0; i < m1.step_continuity.size(); ++i)
    CHECK(std::abs(m1.step_continuity[i] - m2.step_continuity[i]) < 1e-12);
  REQUIRE(m1.global_continuity.size() == m2.global_continuity.size());
  for (size_t i = 0; i < m1.global_continuity.size(); ++i)
    CHECK(std::abs(m1.global_continuity[i] - m2.global_continuity[i]) <
          1e-12);
  CHECK(m1.transition_rate == m2.transition_rate);
  CHECK(m1.dwell_lengths == m2.dwell_lengths);
  CHECK(std::abs(m1.geodesic_efficiency - m2.geodesic_efficiency) < 1e-12);
  REQUIRE(m1.segment_means.size() == m2.segment_means.size());
  for (size_t i = 0; i < m1.segment_means.size(); ++i)
    CHECK(std::abs(m1.segment_means[i] - m2.segment_means[i]) < 1e-12);

  // Curvature carries units of inverse length, so it scales by 1/s.
  CHECK(m2.curvature_within ==
        doctest::Approx(m1.curvature_within / s).epsilon(1e-12));
  CHECK(m2.curvature_trans ==
        doctest::Approx(m1.curvature_trans / s).epsilon(1e-12));
}

TEST_CASE("the metric bundle matches the standalone functions") {
  const auto traj = random_labeled_walk(3, 40, 12);
  const auto m = music::compute_trajectory_metrics(traj);

  CHECK(m.step_continuity == music::step_continuity(traj).values);
  CHECK(m.global_continuity == music::global_continuity(traj).values);
  CHECK(m.transition_rate == music::transition_rate(traj));
  const auto dwell = music::dwell_stats(traj);
  CHECK(m.dwell_lengths == dwell.lengths);
  CHECK(m.dwell_median == dwell.median);
  CHECK(m.dwell_iqr == dwell.iqr);
  const auto curv = music::curvature(traj);
  CHECK(m.curvature_within == curv.within_median);
  CHECK(m.curvature_trans == curv.trans_median);
  CHECK(m.geodesic_efficiency == music::geodesic_efficiency(traj).value);
  const auto seg = music::segmented_continuity(traj);
  CHECK(m.segment_means == seg.segment_means);
  CHECK(m.segmented_median == seg.median);
  CHECK(m.segmented_iqr == seg.iqr);
  CHECK_FALSE(m.no_nonzero_steps);
  CHECK_FALSE(m.zero_initial_step);
  CHECK_FALSE(m.zero_path_length);
}

TEST_CASE("the metric bundle flags degenerate trajectories instead of throwing") {
  SUBCASE("single state") {
    const auto m = music::compute_trajectory_metrics(make_traj({vec({1.0})}));
    CHECK(m.no_nonzero_steps);
    CHECK_FALSE(m.zero_initial_step); // there was no step at all
    CHECK(m.step_continuity.empty());
    CHECK(m.global_continuity.empty());
    CHECK(m.transition_rate == 0.0);
    CHECK(m.dwell_lengths == std::vector<int>{1});
    CHECK(std::isnan(m.curvature_within));
    CHECK(std::isnan(m.curvature_trans));
    CHECK(m.no_within_curvature);
    CHECK(m.no_transition_curvature);
    CHECK(m.zero_path_length);
    CHECK(std::isnan(m.geodesic_efficiency));
    CHECK(m.no_multi_step_segment);
  }
  SUBCASE("zero first step is reported") {
    const auto m = music::compute_trajectory_metrics(traj_from_steps(
        2, {Vector::Zero(2), unit(2, 0), unit(2, 0)}));
    CHECK(m.zero_initial_step);
    CHECK_FALSE(m.no_nonzero_steps);
  }
  SUBCASE("empty trajectories and BMU mismatches still throw") {
    CHECK_THROWS_AS(music::compute_trajectory_metrics(TrajectoryData{}),
                    ContractError);
    TrajectoryData bad;
    bad.states = {vec({0.0}), vec({1.0})};
    bad.bmus = {0};
    CHECK_THROWS_AS(music::compute_trajectory_metrics(bad), ContractError);
  }
}
