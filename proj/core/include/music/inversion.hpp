#pragma once

#include "music/som.hpp"
#include "music/types.hpp"

#include <vector>

namespace music {

/// Linear system B z = c tying a query point to squared-distance activations.
/// Anchoring on unit r and differencing against unit j eliminates the ||z||^2
/// term: row 2 (w_r - w_j)^T with right side a_j - a_r + ||w_r||^2 -
/// ||w_j||^2. One row per non-anchor unit, in `others` order.
struct AnchoredSystem {
  Matrix B; // (K-1) x D
  Vector c; // K-1
  int anchor = 0;
  std::vector<int> others;

  int row_count() const { return static_cast<int>(B.rows()); }
  int dim() const { return static_cast<int>(B.cols()); }
};

struct InversionDiagnostics {
  int rank = 0;
  double sigma_min = 0.0; // smallest singular value of B
  double sigma_max = 0.0;
  /// tr((B^T B)^{-1}) = sum of 1/sigma_i^2; NaN when B is rank deficient.
  double trace_inv = 0.0;
  /// ||z_hat - z||  <=  lipschitz_bound * ||noise||_2 / sigma holds for any
  /// activation perturbation; the bound is sigma * sqrt(K-1) / sigma_min for
  /// the supplied noise scale (0 when no noise model was given).
  double lipschitz_bound = 0.0;
  /// E ||z_hat - z||^2 = sigma^2 * trace_inv under i.i.d. activation noise of
  /// scale sigma (0 when no noise model was given, NaN when rank deficient).
  double expected_mse = 0.0;

  double condition() const {
    return sigma_min > 0.0 ? sigma_max / sigma_min
                           : std::numeric_limits<double>::infinity();
  }
};

struct InversionSolution {
  Vector z;
  InversionDiagnostics diagnostics;
  double residual = 0.0; // ||B z - c||
};

/// Build the anchored system for the given activations. `others` lists the
/// non-anchor units contributing one row each; it must be non-empty, free of
/// duplicates and must not contain the anchor.
AnchoredSystem build_anchored_system(const PrototypeSet& som,
                                     const Vector& activations, int anchor,
                                     const std::vector<int>& others);

/// Least-squares solve of the anchored system. Full-rank systems return the
/// unique least-squares point; rank-deficient systems return the minimum-norm
/// least-squares point, with the deficiency visible in diagnostics.rank.
/// Singular values below 1e-12 * sigma_max count as zero.
InversionSolution solve_inversion(const AnchoredSystem& system);

/// Generalized least squares under row-noise covariance `covariance`
/// (size (K-1) x (K-1), symmetric positive definite): whitens rows with the
/// Cholesky factor and solves the whitened system.
InversionSolution solve_inversion_weighted(const AnchoredSystem& system,
                                           const Matrix& covariance);

/// Noise-propagation diagnostics for activation noise of scale sigma >= 0:
/// spectral data of B plus the worst-case bound sigma * sqrt(K-1) /
/// sigma_min (using the smallest nonzero singular value when rank deficient)
/// and the expected squared error sigma^2 * tr((B^T B)^{-1}).
InversionDiagnostics noise_diagnostics(const AnchoredSystem& system,
                                       double sigma);

} // namespace music
