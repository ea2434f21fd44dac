#include "music/inversion.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <unordered_set>

namespace music {

namespace {

constexpr double kRankThreshold = 1e-12;

InversionDiagnostics spectral_diagnostics(const Eigen::JacobiSVD<Matrix>& svd,
                                          int rows, int dim, double sigma) {
  InversionDiagnostics diag;
  const Vector& s = svd.singularValues();
  diag.sigma_max = s.size() > 0 ? s[0] : 0.0;
  diag.sigma_min = s.size() > 0 ? s[s.size() - 1] : 0.0;

  const double cutoff = kRankThreshold * diag.sigma_max;
  diag.rank = 0;
  double trace_inv = 0.0;
  double smallest_nonzero = 0.0;
  for (int i = 0; i < s.size(); ++i) {
    if (s[i] > cutoff) {
      ++diag.rank;
      trace_inv += 1.0 / (s[i] * s[i]);
      smallest_nonzero = s[i];
    }
  }

  const bool full_rank = diag.rank == std::min(rows, dim) && diag.rank == dim;
  diag.trace_inv =
      full_rank ? trace_inv : std::numeric_limits<double>::quiet_NaN();

  if (sigma > 0.0) {
    diag.lipschitz_bound = smallest_nonzero > 0.0
                               ? sigma * std::sqrt(static_cast<double>(rows)) /
                                     smallest_nonzero
                               : std::numeric_limits<double>::infinity();
    diag.expected_mse = full_rank
                            ? sigma * sigma * trace_inv
                            : std::numeric_limits<double>::quiet_NaN();
  }
  return diag;
}

InversionSolution solve_system(const Matrix& B, const Vector& c) {
  Eigen::JacobiSVD<Matrix> svd(B,
                               Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(kRankThreshold);

  InversionSolution sol;
  sol.diagnostics = spectral_diagnostics(svd, static_cast<int>(B.rows()),
                                         static_cast<int>(B.cols()), 0.0);
  sol.z = svd.solve(c); // minimum-norm least squares
  sol.residual = (B * sol.z - c).norm();
  return sol;
}

} // namespace

AnchoredSystem build_anchored_system(const PrototypeSet& som,
                                     const Vector& activations, int anchor,
                                     const std::vector<int>& others) {
  if (activations.size() != som.units())
    throw ContractError(
        "build_anchored_system: one activation per unit required");
  if (anchor < 0 || anchor >= som.units())
    throw ContractError("build_anchored_system: anchor index out of range");
  if (others.empty())
    throw ContractError("build_anchored_system: no non-anchor units given");

  std::unordered_set<int> seen;
  for (int j : others) {
    if (j < 0 || j >= som.units())
      throw ContractError("build_anchored_system: unit index out of range");
    if (j == anchor)
      throw ContractError(
          "build_anchored_system: anchor may not appear among the rows");
    if (!seen.insert(j).second)
      throw ContractError("build_anchored_system: duplicate unit index");
  }

  AnchoredSystem sys;
  sys.anchor = anchor;
  sys.others = others;
  const int rows = static_cast<int>(others.size());
  sys.B.resize(rows, som.dim());
  sys.c.resize(rows);

  const auto w_r = som.weights.row(anchor);
  const double nr = w_r.squaredNorm();
  for (int i = 0; i < rows; ++i) {
    const auto w_j = som.weights.row(others[i]);
    sys.B.row(i) = 2.0 * (w_r - w_j);
    sys.c[i] = activations[others[i]] - activations[anchor] + nr -
               w_j.squaredNorm();
  }
  return sys;
}

InversionSolution solve_inversion(const AnchoredSystem& system) {
  if (system.row_count() == 0)
    throw ContractError("solve_inversion: empty system");
  return solve_system(system.B, system.c);
}

InversionSolution solve_inversion_weighted(const AnchoredSystem& system,
                                           const Matrix& covariance) {
  const int rows = system.row_count();
  if (rows == 0) throw ContractError("solve_inversion_weighted: empty system");
  if (covariance.rows() != rows || covariance.cols() != rows)
    throw ContractError(
        "solve_inversion_weighted: covariance must be (K-1) x (K-1)");

  Eigen::LLT<Matrix> llt(covariance);
  if (llt.info() != Eigen::Success)
    throw ContractError(
        "solve_inversion_weighted: covariance is not positive definite");

  // Whiten rows with L^{-1}: generalized least squares on the original
  // system equals ordinary least squares on the whitened one.
  const Matrix Bw = llt.matrixL().solve(system.B);
  const Vector cw = llt.matrixL().solve(system.c);
  InversionSolution sol = solve_system(Bw, cw);
  sol.residual = (system.B * sol.z - system.c).norm();
  return sol;
}

InversionDiagnostics noise_diagnostics(const AnchoredSystem& system,
                                       double sigma) {
  if (system.row_count() == 0)
    throw ContractError("noise_diagnostics: empty system");
  if (sigma < 0.0)
    throw ContractError("noise_diagnostics: sigma must be non-negative");
  Eigen::JacobiSVD<Matrix> svd(system.B);
  return spectral_diagnostics(svd, system.row_count(), system.dim(), sigma);
}

} // namespace music
