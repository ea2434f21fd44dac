// Microbenchmarks for the hot paths: activation evaluation, BMU search,
// anchored inversion, the regularized solve, and single trajectory steps.

#include "music/geometry.hpp"
#include "music/inversion.hpp"
#include "music/music.hpp"
#include "music/som.hpp"

#include <benchmark/benchmark.h>

#include <random>

namespace {

using music::Matrix;
using music::PrototypeSet;
using music::Rng;
using music::Vector;

PrototypeSet random_som(int rows, int cols, int dim, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  PrototypeSet som;
  som.lattice_rows = rows;
  som.lattice_cols = cols;
  som.topology = music::Topology::Rectangular;
  som.weights.resize(rows * cols, dim);
  for (Eigen::Index i = 0; i < som.weights.rows(); ++i)
    for (Eigen::Index j = 0; j < dim; ++j) som.weights(i, j) = gauss(rng);
  return som;
}

Vector random_point(int dim, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector z(dim);
  for (int i = 0; i < dim; ++i) z[i] = gauss(rng);
  return z;
}

void bm_activation(benchmark::State& state) {
  Rng rng(1);
  const auto som = random_som(20, 20, static_cast<int>(state.range(0)), rng);
  const Vector z = random_point(static_cast<int>(state.range(0)), rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(music::activation(z, som));
  }
}
BENCHMARK(bm_activation)->Arg(10)->Arg(100);

void bm_bmu(benchmark::State& state) {
  Rng rng(2);
  const auto som = random_som(20, 20, static_cast<int>(state.range(0)), rng);
  const Vector z = random_point(static_cast<int>(state.range(0)), rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(music::bmu(z, som));
  }
}
BENCHMARK(bm_bmu)->Arg(10)->Arg(100);

void bm_anchored_inversion(benchmark::State& state) {
  const int dim = 10;
  const int n_rows = static_cast<int>(state.range(0));
  Rng rng(3);
  const auto som = random_som(20, 20, dim, rng);
  const Vector z = random_point(dim, rng);
  const Vector a = music::activation(z, som);
  const int anchor = music::bmu(z, som);
  std::vector<int> others;
  for (int j = 0; j < som.units() && static_cast<int>(others.size()) < n_rows;
       ++j)
    if (j != anchor) others.push_back(j);
  for (auto _ : state) {
    const auto system = music::build_anchored_system(som, a, anchor, others);
    benchmark::DoNotOptimize(music::solve_inversion(system));
  }
}
BENCHMARK(bm_anchored_inversion)->Arg(10)->Arg(30)->Arg(399);

void bm_music_solve(benchmark::State& state) {
  const int dim = 10;
  const int ns = static_cast<int>(state.range(0));
  Rng rng(4);
  std::normal_distribution<double> gauss(0.0, 1.0);
  music::JacobianBlock a, t;
  a.rows.resize(ns, dim);
  for (Eigen::Index i = 0; i < a.rows.size(); ++i) a.rows.data()[i] = gauss(rng);
  a.row_norms = a.rows.rowwise().norm();
  for (int i = 0; i < ns; ++i) a.units.push_back(i);
  t.rows.resize(1, dim);
  for (int j = 0; j < dim; ++j) t.rows(0, j) = gauss(rng);
  t.row_norms = t.rows.rowwise().norm();
  t.units.push_back(ns);
  Vector b(1);
  b[0] = -0.05;
  const Vector ws = Vector::Ones(ns), wt = Vector::Ones(1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        music::music_solve(a, t, b, 0.85, 1e-4, ws, wt));
  }
}
BENCHMARK(bm_music_solve)->Arg(24)->Arg(399);

void bm_music_solve_svd(benchmark::State& state) {
  const int dim = 10;
  const int rows = static_cast<int>(state.range(0));
  Rng rng(5);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix M(rows, dim);
  for (Eigen::Index i = 0; i < M.size(); ++i) M.data()[i] = gauss(rng);
  Vector y(rows);
  for (int i = 0; i < rows; ++i) y[i] = gauss(rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(music::music_solve_svd(M, y, 1e-4));
  }
}
BENCHMARK(bm_music_solve_svd)->Arg(25)->Arg(400);

void bm_free_step(benchmark::State& state) {
  Rng rng(6);
  const auto som = random_som(20, 20, 10, rng);
  const Vector z = random_point(10, rng);
  music::MusicConfig cfg;
  Rng step_rng(7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(music::free_step(z, som, cfg, step_rng));
  }
}
BENCHMARK(bm_free_step);

void bm_informed_step(benchmark::State& state) {
  Rng rng(8);
  const auto som = random_som(20, 20, 10, rng);
  const Vector z = random_point(10, rng);
  music::MusicConfig cfg;
  Rng step_rng(9);
  for (auto _ : state) {
    benchmark::DoNotOptimize(music::informed_step(z, som, 17, cfg, step_rng));
  }
}
BENCHMARK(bm_informed_step);

} // namespace

BENCHMARK_MAIN();
