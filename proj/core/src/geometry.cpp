#include "music/geometry.hpp"

#include <cmath>
#include <string>

namespace music {

Vector activation(const Vector& z, const PrototypeSet& som) {
  if (z.size() != som.dim())
    throw ContractError("activation: query dimension does not match prototypes");
  return (som.weights.rowwise() - z.transpose()).rowwise().squaredNorm();
}

JacobianBlock activation_jacobian(const Vector& z, const PrototypeSet& som,
                                  const std::vector<int>& units,
                                  bool normalize) {
  if (z.size() != som.dim())
    throw ContractError(
        "activation_jacobian: query dimension does not match prototypes");

  JacobianBlock block;
  block.units = units;
  block.normalized = normalize;
  block.rows.resize(static_cast<int>(units.size()), som.dim());
  block.row_norms.resize(static_cast<int>(units.size()));

  for (int i = 0; i < static_cast<int>(units.size()); ++i) {
    const int j = units[i];
    if (j < 0 || j >= som.units())
      throw ContractError("activation_jacobian: unit index out of range");
    const Vector raw = 2.0 * (z - som.weights.row(j).transpose());
    const double norm = raw.norm();
    block.row_norms[i] = norm;
    if (!normalize) {
      block.rows.row(i) = raw.transpose();
      continue;
    }
    if (norm == 0.0)
      throw DegenerateRowError(
          j, "activation_jacobian: z coincides with prototype " +
                 std::to_string(j) + ", normalized row undefined");
    block.rows.row(i) = raw.transpose() / norm;
  }
  return block;
}

Vector radial_tangential_step(const Vector& z, const PrototypeSet& som, int k,
                              double delta_d, double r_scale, Rng& rng) {
  if (z.size() != som.dim())
    throw ContractError(
        "radial_tangential_step: query dimension does not match prototypes");
  if (k < 0 || k >= som.units())
    throw ContractError("radial_tangential_step: unit index out of range");
  if (r_scale < 1.0)
    throw ContractError("radial_tangential_step: r_scale must be >= 1");

  const Vector x = z - som.weights.row(k).transpose();
  const double d = x.norm();
  if (d == 0.0)
    throw DegenerateRowError(
        k, "radial_tangential_step: z coincides with prototype, radial "
           "direction undefined");
  if (d + delta_d < 0.0)
    throw ContractError(
        "radial_tangential_step: requested distance would be negative");

  const int dim = static_cast<int>(z.size());
  if (dim == 1 && r_scale != 1.0)
    throw ContractError(
        "radial_tangential_step: no tangential direction exists in one "
        "dimension, r_scale must be 1");

  // c is half the implied change of the squared distance.
  const double c = ((d + delta_d) * (d + delta_d) - d * d) / 2.0;
  if (c == 0.0) return Vector::Zero(dim);

  const Vector radial = (c / (d * d)) * x;
  const double tangential_norm =
      radial.norm() * std::sqrt(r_scale * r_scale - 1.0);
  if (tangential_norm == 0.0) return radial;

  // Isotropic tangent direction: draw a Gaussian vector, remove the radial
  // component, renormalize. The zero-projection event has probability zero;
  // redraw if rounding produces it anyway.
  std::normal_distribution<double> gauss(0.0, 1.0);
  const Vector radial_hat = x / d;
  for (int attempt = 0; attempt < 64; ++attempt) {
    Vector g(dim);
    for (int i = 0; i < dim; ++i) g[i] = gauss(rng);
    Vector t = g - radial_hat.dot(g) * radial_hat;
    const double tn = t.norm();
    if (tn > 1e-12) return radial + (tangential_norm / tn) * t;
  }
  throw std::runtime_error(
      "radial_tangential_step: failed to draw a tangent direction");
}

} // namespace music
