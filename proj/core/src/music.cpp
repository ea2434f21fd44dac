#include "music/music.hpp"

#include "music/stats.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <utility>

namespace music {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_block_weights(const JacobianBlock& block, const Vector& w,
                         const char* name) {
  if (w.size() != block.row_count())
    throw ContractError(std::string("music_solve: ") + name +
                        " weight count does not match block rows");
  for (int i = 0; i < w.size(); ++i)
    if (w[i] < 0.0)
      throw ContractError(std::string("music_solve: negative ") + name +
                          " weight");
}

/// Shared solve state so step functions can reuse the factorization for the
/// smallest-eigenvalue estimate.
struct SolveState {
  Eigen::LLT<Matrix> llt;
  Vector dz;
  bool zero_rhs = false;
};

SolveState music_solve_state(const JacobianBlock& A_S,
                             const JacobianBlock& B_T, const Vector& b,
                             double gamma, double lambda, const Vector& W_S,
                             const Vector& W_T) {
  if (lambda <= 0.0) throw ContractError("music_solve: lambda must be > 0");
  if (gamma < 0.0 || gamma > 1.0)
    throw ContractError("music_solve: gamma must lie in [0, 1]");
  if (b.size() != B_T.row_count())
    throw ContractError("music_solve: one target increment per B_T row");
  check_block_weights(A_S, W_S, "preservation");
  check_block_weights(B_T, W_T, "target");

  int dim = 0;
  if (A_S.row_count() > 0)
    dim = static_cast<int>(A_S.rows.cols());
  else if (B_T.row_count() > 0)
    dim = static_cast<int>(B_T.rows.cols());
  else
    throw ContractError("music_solve: both blocks empty, dimension unknown");
  if (A_S.row_count() > 0 && B_T.row_count() > 0 &&
      A_S.rows.cols() != B_T.rows.cols())
    throw ContractError("music_solve: block dimensions disagree");

  Matrix H = Matrix::Zero(dim, dim);
  if (A_S.row_count() > 0 && gamma < 1.0) {
    const Matrix Aw = W_S.asDiagonal() * A_S.rows;
    H.selfadjointView<Eigen::Lower>().rankUpdate(Aw.transpose(), 1.0 - gamma);
  }
  Vector rhs = Vector::Zero(dim);
  if (B_T.row_count() > 0 && gamma > 0.0) {
    const Matrix Bw = W_T.asDiagonal() * B_T.rows;
    H.selfadjointView<Eigen::Lower>().rankUpdate(Bw.transpose(), gamma);
    rhs.noalias() = gamma * (Bw.transpose() * (W_T.asDiagonal() * b));
  }
  H.diagonal().array() += lambda;

  SolveState state;
  const Matrix H_full = H.selfadjointView<Eigen::Lower>();
  state.llt.compute(H_full);
  if (state.llt.info() != Eigen::Success)
    throw std::runtime_error("music_solve: factorization failed");
  if (rhs.isZero(0.0)) {
    state.zero_rhs = true;
    state.dz = Vector::Zero(dim);
  } else {
    state.dz = state.llt.solve(rhs);
    // One pass of iterative refinement: the normal equations square the
    // conditioning, and the extra solve buys back the lost digits.
    state.dz += state.llt.solve(rhs - H_full * state.dz);
  }
  return state;
}

/// Inverse iteration on the already-factored H; accurate enough for a
/// diagnostic (the iterate is deterministic).
double smallest_eigenvalue_estimate(const Eigen::LLT<Matrix>& llt, int dim) {
  Vector x = Vector::Ones(dim) / std::sqrt(static_cast<double>(dim));
  for (int it = 0; it < 32; ++it) {
    x = llt.solve(x);
    const double n = x.norm();
    if (n == 0.0) return 0.0;
    x /= n;
  }
  const double rayleigh_inv = x.dot(llt.solve(x));
  return rayleigh_inv > 0.0 ? 1.0 / rayleigh_inv : 0.0;
}

Vector resolve_block_weights(const WeightScheme& scheme,
                             const JacobianBlock& block) {
  const int n = block.row_count();
  if (scheme.kind == WeightScheme::Kind::Uniform || n == 0)
    return Vector::Ones(n);
  std::vector<double> d(n);
  for (int i = 0; i < n; ++i) d[i] = block.row_norms[i] / 2.0;
  const double h = scheme.bandwidth > 0.0 ? scheme.bandwidth : median(d);
  if (h <= 0.0) return Vector::Ones(n); // all rows at distance zero
  Vector w(n);
  for (int i = 0; i < n; ++i) w[i] = std::exp(-(d[i] * d[i]) / (2.0 * h * h));
  return w;
}

/// Adds an isotropic perturbation of exact Euclidean norm `jitter` to every
/// row. Draw order: one D-vector per row, rows in block order.
void apply_row_jitter(JacobianBlock& block, double jitter, Rng& rng) {
  if (jitter <= 0.0 || block.row_count() == 0) return;
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int dim = static_cast<int>(block.rows.cols());
  for (int i = 0; i < block.row_count(); ++i) {
    Vector g(dim);
    for (int k = 0; k < dim; ++k) g[k] = gauss(rng);
    const double n = g.norm();
    if (n > 0.0) block.rows.row(i) += (jitter / n) * g.transpose();
  }
}

std::vector<int> preservation_set(const Vector& z, const PrototypeSet& som,
                                  const PreserveScope& scope,
                                  std::vector<int> excluded) {
  std::vector<int> base;
  if (scope.kind == PreserveScope::Kind::AllNonTargets) {
    base.resize(som.units());
    std::iota(base.begin(), base.end(), 0);
  } else {
    base = lattice_neighborhood(bmu(z, som), scope.ring_radius, som);
  }
  std::sort(excluded.begin(), excluded.end());
  std::vector<int> out;
  out.reserve(base.size());
  for (int j : base)
    if (!std::binary_search(excluded.begin(), excluded.end(), j))
      out.push_back(j);
  return out;
}

void clip_to(Vector& v, double tau, bool& fired) {
  const double n = v.norm();
  if (n > tau) {
    v *= tau / n;
    fired = true;
  }
}

StepResult zero_step(int dim, std::vector<int> selected) {
  StepResult r;
  r.dz = Vector::Zero(dim);
  r.dz_deterministic = Vector::Zero(dim);
  r.selected_targets = std::move(selected);
  r.h_sigma_min = kNaN;
  r.clipped = false;
  return r;
}

/// Informed/cluster body: the target subset is already drawn. `exclude`
/// lists the units kept out of the preservation set. Noise order follows
/// the update tables: jitter while building blocks, target noise on b,
/// solve, step noise, one trust clip.
StepResult targeted_step_impl(const Vector& z, const PrototypeSet& som,
                              std::vector<int> selected,
                              const std::vector<int>& exclude,
                              const MusicConfig& cfg, Rng& rng) {
  const int dim = som.dim();
  if (selected.size() == 1 &&
      (z - som.weights.row(selected[0]).transpose()).norm() == 0.0)
    return zero_step(dim, std::move(selected)); // already at the target

  const double tau = resolve_trust_radius(cfg.trust, z, som);
  const std::vector<int> S = preservation_set(z, som, cfg.preserve_scope,
                                              exclude);

  JacobianBlock A_S = activation_jacobian(z, som, S, cfg.normalize_rows);
  JacobianBlock B_T =
      activation_jacobian(z, som, selected, cfg.normalize_rows);
  apply_row_jitter(A_S, cfg.jitter, rng);
  apply_row_jitter(B_T, cfg.jitter, rng);

  Vector b(B_T.row_count());
  for (int i = 0; i < B_T.row_count(); ++i) {
    const double d = B_T.row_norms[i] / 2.0;
    b[i] = -cfg.eta * (cfg.distance_targets ? d : d * d);
  }
  if (cfg.sigma_b > 0.0) {
    std::normal_distribution<double> gauss(0.0, cfg.sigma_b);
    for (int i = 0; i < b.size(); ++i) b[i] += gauss(rng);
  }

  const Vector W_S = resolve_block_weights(cfg.weight_scheme, A_S);
  const Vector W_T = resolve_block_weights(cfg.weight_scheme, B_T);
  SolveState state =
      music_solve_state(A_S, B_T, b, cfg.gamma, cfg.lambda, W_S, W_T);

  StepResult r;
  r.selected_targets = std::move(selected);
  r.h_sigma_min = smallest_eigenvalue_estimate(state.llt, dim);

  bool det_clip = false;
  r.dz_deterministic = state.dz;
  clip_to(r.dz_deterministic, tau, det_clip);

  r.dz = state.dz;
  if (cfg.sigma_z > 0.0) {
    std::normal_distribution<double> gauss(0.0, cfg.sigma_z);
    Vector xi(dim);
    for (int k = 0; k < dim; ++k) xi[k] = gauss(rng);
    r.dz += xi;
  }
  bool final_clip = false;
  clip_to(r.dz, tau, final_clip);
  r.clipped = det_clip || final_clip;
  return r;
}

void check_targets(const PrototypeSet& som, const std::vector<int>& targets,
                   const char* who) {
  if (targets.empty())
    throw ContractError(std::string(who) + ": empty target set");
  std::vector<int> sorted = targets;
  std::sort(sorted.begin(), sorted.end());
  for (size_t i = 0; i < sorted.size(); ++i) {
    if (sorted[i] < 0 || sorted[i] >= som.units())
      throw ContractError(std::string(who) + ": target index out of range");
    if (i > 0 && sorted[i] == sorted[i - 1])
      throw ContractError(std::string(who) + ": duplicate target index");
  }
}

} // namespace

void MusicConfig::validate() const {
  if (gamma < 0.0 || gamma > 1.0)
    throw ContractError("MusicConfig: gamma must lie in [0, 1]");
  if (lambda <= 0.0) throw ContractError("MusicConfig: lambda must be > 0");
  if (eta <= 0.0 || eta > 1.0)
    throw ContractError("MusicConfig: eta must lie in (0, 1]");
  if (trust.value <= 0.0)
    throw ContractError("MusicConfig: trust value must be > 0");
  if (sigma_z < 0.0 || sigma_b < 0.0 || jitter < 0.0)
    throw ContractError("MusicConfig: noise scales must be >= 0");
  if (passes < 1) throw ContractError("MusicConfig: passes must be >= 1");
  if (subsample.kind == SubsampleRule::Kind::FixedK && subsample.k < 1)
    throw ContractError("MusicConfig: fixed-k subset size must be >= 1");
  if (subsample.kind == SubsampleRule::Kind::BernoulliP &&
      (subsample.p <= 0.0 || subsample.p > 1.0))
    throw ContractError("MusicConfig: bernoulli keep probability in (0, 1]");
  if (weight_scheme.kind == WeightScheme::Kind::GaussianDistance &&
      weight_scheme.bandwidth < 0.0)
    throw ContractError("MusicConfig: bandwidth must be >= 0");
  if (preserve_scope.kind == PreserveScope::Kind::Ring &&
      preserve_scope.ring_radius < 0)
    throw ContractError("MusicConfig: ring radius must be >= 0");
}

Vector music_solve(const JacobianBlock& A_S, const JacobianBlock& B_T,
                   const Vector& b, double gamma, double lambda,
                   const Vector& W_S, const Vector& W_T) {
  return music_solve_state(A_S, B_T, b, gamma, lambda, W_S, W_T).dz;
}

Vector music_solve_svd(const Matrix& M, const Vector& y, double lambda) {
  if (lambda <= 0.0)
    throw ContractError("music_solve_svd: lambda must be > 0");
  if (y.size() != M.rows())
    throw ContractError("music_solve_svd: y length must match M rows");
  Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  Vector coeffs = svd.matrixU().transpose() * y;
  for (int k = 0; k < s.size(); ++k)
    coeffs[k] *= s[k] / (s[k] * s[k] + lambda);
  return svd.matrixV() * coeffs;
}

std::pair<Matrix, Vector> stack_music_system(const JacobianBlock& A_S,
                                             const JacobianBlock& B_T,
                                             const Vector& b, double gamma,
                                             const Vector& W_S,
                                             const Vector& W_T) {
  if (gamma < 0.0 || gamma > 1.0)
    throw ContractError("stack_music_system: gamma must lie in [0, 1]");
  if (b.size() != B_T.row_count())
    throw ContractError("stack_music_system: b length must match B_T rows");
  check_block_weights(A_S, W_S, "preservation");
  check_block_weights(B_T, W_T, "target");

  const int dim = A_S.row_count() > 0 ? static_cast<int>(A_S.rows.cols())
                                      : static_cast<int>(B_T.rows.cols());
  const int rows = A_S.row_count() + B_T.row_count();
  Matrix M(rows, dim);
  Vector y = Vector::Zero(rows);
  if (A_S.row_count() > 0)
    M.topRows(A_S.row_count()) =
        std::sqrt(1.0 - gamma) * (W_S.asDiagonal() * A_S.rows);
  if (B_T.row_count() > 0) {
    M.bottomRows(B_T.row_count()) =
        std::sqrt(gamma) * (W_T.asDiagonal() * B_T.rows);
    y.tail(B_T.row_count()) = std::sqrt(gamma) * (W_T.asDiagonal() * b);
  }
  return {std::move(M), std::move(y)};
}

std::vector<std::pair<double, double>> lambda_scan(
    const JacobianBlock& A_S, const JacobianBlock& B_T, const Vector& b,
    double gamma, const Vector& W_S, const Vector& W_T,
    const std::vector<double>& lambdas) {
  const auto [M, y] = stack_music_system(A_S, B_T, b, gamma, W_S, W_T);
  Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  const Vector uty = svd.matrixU().transpose() * y;
  std::vector<std::pair<double, double>> out;
  out.reserve(lambdas.size());
  for (double lambda : lambdas) {
    if (lambda <= 0.0)
      throw ContractError("lambda_scan: every lambda must be > 0");
    Vector coeffs = uty;
    for (int k = 0; k < s.size(); ++k)
      coeffs[k] *= s[k] / (s[k] * s[k] + lambda);
    const Vector dz = svd.matrixV() * coeffs;
    out.emplace_back(dz.norm(), (M * dz - y).norm());
  }
  return out;
}

double resolve_trust_radius(const TrustRegion& trust, const Vector& z,
                            const PrototypeSet& som) {
  double tau = trust.value;
  if (trust.kind == TrustRegion::Kind::BmuRelative)
    tau *= (z - som.weights.row(bmu(z, som)).transpose()).norm();
  if (tau <= 0.0)
    throw ContractError("trust radius resolved to a non-positive value");
  return tau;
}

StepResult free_step(const Vector& z, const PrototypeSet& som,
                     const MusicConfig& cfg, Rng& rng) {
  cfg.validate();
  const int dim = som.dim();
  const double tau = resolve_trust_radius(cfg.trust, z, som);

  const std::vector<int> S =
      preservation_set(z, som, cfg.preserve_scope, {});
  JacobianBlock A_S = activation_jacobian(z, som, S, cfg.normalize_rows);
  apply_row_jitter(A_S, cfg.jitter, rng);
  const Vector W_S = resolve_block_weights(cfg.weight_scheme, A_S);

  Matrix C = Matrix::Zero(dim, dim);
  if (A_S.row_count() > 0) {
    const Matrix Aw = W_S.asDiagonal() * A_S.rows;
    C.selfadjointView<Eigen::Lower>().rankUpdate(Aw.transpose(), 1.0);
  }
  C.diagonal().array() += cfg.lambda;

  Eigen::SelfAdjointEigenSolver<Matrix> eig(
      Matrix(C.selfadjointView<Eigen::Lower>()));
  if (eig.info() != Eigen::Success)
    throw std::runtime_error("free_step: eigendecomposition failed");
  Vector q = eig.eigenvectors().col(0); // ascending eigenvalues
  for (int i = 0; i < dim; ++i) {
    if (std::abs(q[i]) > 1e-14) { // sign rule: first nonzero coordinate > 0
      if (q[i] < 0.0) q = -q;
      break;
    }
  }

  StepResult r;
  r.h_sigma_min = eig.eigenvalues()[0];
  r.dz_deterministic = tau * q;
  r.dz = r.dz_deterministic;

  bool noise_clip = false;
  if (cfg.sigma_z > 0.0) {
    std::normal_distribution<double> gauss(0.0, cfg.sigma_z);
    Vector xi(dim);
    for (int k = 0; k < dim; ++k) xi[k] = gauss(rng);
    clip_to(xi, tau, noise_clip);
    r.dz += xi;
  }
  bool final_clip = false;
  clip_to(r.dz, tau, final_clip);
  r.clipped = noise_clip || final_clip;
  return r;
}

StepResult informed_step(const Vector& z, const PrototypeSet& som, int target,
                         const MusicConfig& cfg, Rng& rng) {
  cfg.validate();
  if (target < 0 || target >= som.units())
    throw ContractError("informed_step: target index out of range");
  return targeted_step_impl(z, som, {target}, {target}, cfg, rng);
}

StepResult cluster_step(const Vector& z, const PrototypeSet& som,
                        const std::vector<int>& targets,
                        const MusicConfig& cfg, Rng& rng) {
  cfg.validate();
  check_targets(som, targets, "cluster_step");

  std::vector<int> sub;
  switch (cfg.subsample.kind) {
    case SubsampleRule::Kind::All:
      sub = targets;
      break;
    case SubsampleRule::Kind::FixedK: {
      const int k = cfg.subsample.k;
      if (k > static_cast<int>(targets.size()))
        throw ContractError("cluster_step: fixed-k exceeds target set size");
      if (k == static_cast<int>(targets.size())) {
        sub = targets;
      } else {
        std::sample(targets.begin(), targets.end(), std::back_inserter(sub),
                    k, rng);
      }
      break;
    }
    case SubsampleRule::Kind::BernoulliP: {
      if (cfg.subsample.p >= 1.0) {
        sub = targets;
        break;
      }
      std::bernoulli_distribution keep(cfg.subsample.p);
      for (int attempt = 0; attempt < 8 && sub.empty(); ++attempt) {
        for (int t : targets)
          if (keep(rng)) sub.push_back(t);
      }
      if (sub.empty()) sub = targets; // all redraws empty: fall back to T
      break;
    }
    case SubsampleRule::Kind::SingleRandom: {
      if (targets.size() == 1) {
        sub = targets;
      } else {
        std::uniform_int_distribution<size_t> pick(0, targets.size() - 1);
        sub = {targets[pick(rng)]};
      }
      break;
    }
  }

  // The single-prototype regime preserves everything except the drawn unit;
  // multi-element subsets keep the whole cluster out of the preservation set.
  // exclude must be an independent copy: moving sub into the call would gut
  // a reference to it before the step runs.
  const bool single = cfg.subsample.kind == SubsampleRule::Kind::SingleRandom;
  std::vector<int> exclude = single ? sub : targets;
  return targeted_step_impl(z, som, std::move(sub), exclude, cfg, rng);
}

StepResult free_step(const Vector& z, const PrototypeSet& som,
                     const MusicConfig& cfg) {
  Rng rng(cfg.seed);
  return free_step(z, som, cfg, rng);
}

StepResult informed_step(const Vector& z, const PrototypeSet& som, int target,
                         const MusicConfig& cfg) {
  Rng rng(cfg.seed);
  return informed_step(z, som, target, cfg, rng);
}

StepResult cluster_step(const Vector& z, const PrototypeSet& som,
                        const std::vector<int>& targets,
                        const MusicConfig& cfg) {
  Rng rng(cfg.seed);
  return cluster_step(z, som, targets, cfg, rng);
}

Vector radial_baseline_step(const Vector& z, const PrototypeSet& som, int j,
                            double step_len) {
  if (j < 0 || j >= som.units())
    throw ContractError("radial_baseline_step: unit index out of range");
  if (z.size() != som.dim())
    throw ContractError("radial_baseline_step: dimension mismatch");
  const Vector x = z - som.weights.row(j).transpose();
  const double n = x.norm();
  if (n == 0.0)
    throw DegenerateRowError(
        j, "radial_baseline_step: z coincides with the prototype");
  return (step_len / n) * x;
}

Trajectory run_trajectory(const Vector& z0, const PrototypeSet& som,
                          const TrajectoryMode& mode, const MusicConfig& cfg,
                          int steps) {
  cfg.validate();
  if (steps < 0) throw ContractError("run_trajectory: negative step count");
  if (z0.size() != som.dim())
    throw ContractError("run_trajectory: z0 dimension mismatch");
  if (const auto* m = std::get_if<InformedMode>(&mode)) {
    if (m->target < 0 || m->target >= som.units())
      throw ContractError("run_trajectory: target index out of range");
  }
  if (const auto* m = std::get_if<ClusterMode>(&mode))
    check_targets(som, m->targets, "run_trajectory");
  if (const auto* m = std::get_if<BaselineMode>(&mode)) {
    if (m->units.empty())
      throw ContractError("run_trajectory: empty baseline unit sequence");
    for (int j : m->units)
      if (j < 0 || j >= som.units())
        throw ContractError("run_trajectory: baseline unit out of range");
  }

  Trajectory traj;
  traj.config = cfg;
  traj.mode = std::holds_alternative<FreeMode>(mode)       ? "free"
              : std::holds_alternative<InformedMode>(mode) ? "informed"
              : std::holds_alternative<ClusterMode>(mode)  ? "cluster"
                                                           : "baseline";
  Rng rng(cfg.seed);
  Vector z = z0;
  traj.states.push_back(z);
  traj.bmu_per_state.push_back(bmu(z, som));

  int recorded = 0;
  for (int outer = 0; outer < steps; ++outer) {
    for (int pass = 0; pass < cfg.passes; ++pass, ++recorded) {
      const std::string at = "step " + std::to_string(recorded) + ": ";
      StepResult r;
      try {
        if (std::holds_alternative<FreeMode>(mode)) {
          r = free_step(z, som, cfg, rng);
        } else if (const auto* m = std::get_if<InformedMode>(&mode)) {
          r = informed_step(z, som, m->target, cfg, rng);
        } else if (const auto* m = std::get_if<ClusterMode>(&mode)) {
          r = cluster_step(z, som, m->targets, cfg, rng);
        } else {
          const auto& base = std::get<BaselineMode>(mode);
          const int unit =
              base.units[static_cast<std::size_t>(recorded) %
                         base.units.size()];
          r.dz = radial_baseline_step(z, som, unit, base.step_len);
          r.dz_deterministic = r.dz;
          r.selected_targets = {unit};
          r.h_sigma_min = kNaN;
          r.clipped = false;
        }
      } catch (const DegenerateRowError& e) {
        throw DegenerateRowError(e.unit(), at + e.what());
      } catch (const ContractError& e) {
        throw ContractError(at + e.what());
      } catch (const std::exception& e) {
        throw std::runtime_error(at + e.what());
      }
      z += r.dz;
      traj.states.push_back(z);
      traj.bmu_per_state.push_back(bmu(z, som));
      traj.steps.push_back(std::move(r));
    }
  }
  return traj;
}

} // namespace music
