#pragma once

#include "music/geometry.hpp"
#include "music/som.hpp"
#include "music/types.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace music {

/// Per-step cap on the update norm. Absolute trust uses `value` directly;
/// BMU-relative trust resolves to value * ||z - w_BMU|| at every step.
struct TrustRegion {
  enum class Kind { Absolute, BmuRelative };
  Kind kind = Kind::BmuRelative;
  double value = 0.02;
};

/// How cluster steps draw the per-iteration target subset T(i) from T.
struct SubsampleRule {
  enum class Kind { All, FixedK, BernoulliP, SingleRandom };
  Kind kind = Kind::All;
  int k = 1;       // FixedK subset size, must be <= |T|
  double p = 0.5;  // BernoulliP keep probability, in (0, 1]
};

/// Diagonal row weights for the preservation and target blocks. Uniform
/// weights are all ones; the Gaussian scheme uses exp(-d_j^2 / (2 h^2)) in
/// the current distances d_j, with h = `bandwidth` when positive and the
/// median of the block's current distances otherwise.
struct WeightScheme {
  enum class Kind { Uniform, GaussianDistance };
  Kind kind = Kind::Uniform;
  double bandwidth = 0.0;
};

/// Which units form the preservation set: every non-target unit, or only the
/// lattice ring of the given Chebyshev radius around the current BMU
/// (targets excluded either way).
struct PreserveScope {
  enum class Kind { AllNonTargets, Ring };
  Kind kind = Kind::AllNonTargets;
  int ring_radius = 1;
};

struct MusicConfig {
  double gamma = 0.85; // preservation/attraction balance, in [0, 1]
  double lambda = 1e-4; // ridge strength, > 0
  double eta = 0.04; // fractional target reduction per step, in (0, 1]
  TrustRegion trust;
  double sigma_z = 0.0; // step-noise scale, >= 0
  double sigma_b = 0.0; // target-noise scale, >= 0
  double jitter = 0.0;  // per-row Jacobian perturbation norm, >= 0
  int passes = 1;       // relinearization passes per outer step, >= 1
  SubsampleRule subsample;
  WeightScheme weight_scheme;
  PreserveScope preserve_scope;
  bool normalize_rows = true;
  /// Target increments default to squared-distance form b_t = -eta * a_t(z);
  /// this switches to the plain-distance form b_t = -eta * d_t(z).
  bool distance_targets = false;
  std::uint64_t seed = 0;

  /// Throws ContractError when any field is out of its documented range.
  void validate() const;
};

struct StepResult {
  Vector dz;
  /// Trust-clipped deterministic update; equals dz when every noise scale is
  /// zero.
  Vector dz_deterministic;
  std::vector<int> selected_targets;
  /// Smallest eigenvalue of the step's quadratic form: exact for the free
  /// mode's preservation metric C, estimated by inverse iteration on H for
  /// the informed/cluster modes, NaN for zero-step early returns.
  double h_sigma_min = 0.0;
  /// Whether any trust rescale fired during this step.
  bool clipped = false;
};

struct FreeMode {};
struct InformedMode {
  int target = 0;
};
struct ClusterMode {
  std::vector<int> targets;
};
/// No-preservation radial baseline: recorded step t walks along the radial
/// direction of units[t % units.size()] with fixed length step_len.
struct BaselineMode {
  std::vector<int> units;
  double step_len = 0.1;
};
using TrajectoryMode =
    std::variant<FreeMode, InformedMode, ClusterMode, BaselineMode>;

struct Trajectory {
  std::vector<Vector> states; // T+1 entries
  std::vector<StepResult> steps; // T entries, states[t+1] = states[t] + dz
  std::vector<int> bmu_per_state; // T+1 entries
  std::string mode; // "free", "informed", "cluster" or "baseline"
  MusicConfig config;

  int step_count() const { return static_cast<int>(steps.size()); }
};

/// Solve the Tikhonov-regularized update energy
///   (1-gamma) ||W_S A_S dz||^2 + gamma ||W_T (B_T dz - b)||^2
///   + lambda ||dz||^2
/// through its normal equations
///   [(1-gamma) (W_S A_S)^T (W_S A_S) + gamma (W_T B_T)^T (W_T B_T)
///    + lambda I] dz = gamma (W_T B_T)^T (W_T b).
/// lambda > 0 makes the system symmetric positive definite, so the solution
/// is unique. W_S and W_T hold the diagonal weights, one non-negative entry
/// per block row. gamma = 0 or b = 0 give exactly zero.
Vector music_solve(const JacobianBlock& A_S, const JacobianBlock& B_T,
                   const Vector& b, double gamma, double lambda,
                   const Vector& W_S, const Vector& W_T);

/// Same minimizer through the spectral filter: with M = [sqrt(1-gamma) W_S
/// A_S; sqrt(gamma) W_T B_T] and y = [0; sqrt(gamma) W_T b], the update is
/// sum_k sigma_k / (sigma_k^2 + lambda) <y, u_k> v_k over the SVD of M.
Vector music_solve_svd(const Matrix& M, const Vector& y, double lambda);

/// Build the stacked (M, y) pair that music_solve_svd expects from the same
/// inputs music_solve takes.
std::pair<Matrix, Vector> stack_music_system(const JacobianBlock& A_S,
                                             const JacobianBlock& B_T,
                                             const Vector& b, double gamma,
                                             const Vector& W_S,
                                             const Vector& W_T);

/// Raw L-curve data for ridge selection: solve the same stacked system for
/// every lambda in the grid (each must be > 0) and report the pair
/// (||dz||, ||M dz - y||) per lambda, in grid order. No corner detection.
std::vector<std::pair<double, double>> lambda_scan(
    const JacobianBlock& A_S, const JacobianBlock& B_T, const Vector& b,
    double gamma, const Vector& W_S, const Vector& W_T,
    const std::vector<double>& lambdas);

/// Resolve the trust radius at the current point; throws ContractError when
/// the resolved radius is not strictly positive.
double resolve_trust_radius(const TrustRegion& trust, const Vector& z,
                            const PrototypeSet& som);

/// One free-exploration step: no target, deterministic part tau * q_min
/// where q_min is the unit eigenvector for the smallest eigenvalue of
/// C = (W_S A_S)^T (W_S A_S) + lambda I (sign fixed so the first nonzero
/// coordinate is positive; ties resolved by the eigensolver's orthonormal
/// basis order). Step noise is clipped to tau, added, and the combination is
/// clipped to tau again.
StepResult free_step(const Vector& z, const PrototypeSet& som,
                     const MusicConfig& cfg, Rng& rng);

/// One informed step toward prototype `target`: preserves every other unit
/// (or the configured ring), requests b = -eta * a_t(z) (or the distance
/// form), perturbs b by target noise, solves, adds step noise, trust-clips.
/// z exactly at the target returns the zero step without consuming `rng`.
StepResult informed_step(const Vector& z, const PrototypeSet& som, int target,
                         const MusicConfig& cfg, Rng& rng);

/// One cluster step toward the target set T: draws the per-iteration subset
/// per cfg.subsample (recorded in selected_targets), preserves the
/// complement of T (of the drawn singleton in single-random mode), then
/// solves, adds noise and clips exactly like the informed step.
StepResult cluster_step(const Vector& z, const PrototypeSet& som,
                        const std::vector<int>& targets,
                        const MusicConfig& cfg, Rng& rng);

/// Convenience overloads seeding a fresh generator from cfg.seed, so equal
/// inputs give equal outputs.
StepResult free_step(const Vector& z, const PrototypeSet& som,
                     const MusicConfig& cfg);
StepResult informed_step(const Vector& z, const PrototypeSet& som, int target,
                         const MusicConfig& cfg);
StepResult cluster_step(const Vector& z, const PrototypeSet& som,
                        const std::vector<int>& targets,
                        const MusicConfig& cfg);

/// Pure radial move of length |step_len| along (z - w_j) / ||z - w_j||:
/// positive step_len walks away from the prototype, negative toward it. No
/// preservation solve. Throws DegenerateRowError when z == w_j.
Vector radial_baseline_step(const Vector& z, const PrototypeSet& som, int j,
                            double step_len);

/// Run `steps` outer steps of the chosen mode from z0, applying cfg.passes
/// relinearization passes per outer step. Every pass is recorded, so the
/// trajectory holds steps * passes StepResults and one more state. A single
/// generator seeded from cfg.seed drives all randomness; equal seeds give
/// bitwise-equal trajectories. Step errors are rethrown with the failing
/// step index prepended. steps = 0 returns the single-state trajectory.
Trajectory run_trajectory(const Vector& z0, const PrototypeSet& som,
                          const TrajectoryMode& mode, const MusicConfig& cfg,
                          int steps);

} // namespace music
