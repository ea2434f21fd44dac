#pragma once

#include "music/som.hpp"
#include "music/types.hpp"

#include <vector>

namespace music {

/// A block of squared-distance Jacobian rows evaluated at one point.
/// Row i differentiates a_j(z) = ||z - w_j||^2 for j = units[i]: the raw row
/// is 2 (z - w_j)^T with Euclidean norm 2 ||z - w_j||. When `normalized` the
/// stored rows are raw rows divided by their norms (unit length), and
/// `row_norms` still records the raw norms.
struct JacobianBlock {
  Matrix rows;            // M x D
  std::vector<int> units; // prototype index per row
  Vector row_norms;       // norm of each raw row, 2 ||z - w_j||
  bool normalized = false;

  int row_count() const { return static_cast<int>(rows.rows()); }
};

/// Squared Euclidean distance from z to every prototype: a_j = ||z - w_j||^2.
Vector activation(const Vector& z, const PrototypeSet& som);

/// Jacobian rows of the squared-distance activations for the listed units,
/// in the listed order. With `normalize` set, each row is scaled to unit
/// norm; a unit whose prototype coincides with z then raises
/// DegenerateRowError since its row direction is undefined.
JacobianBlock activation_jacobian(const Vector& z, const PrototypeSet& som,
                                  const std::vector<int>& units,
                                  bool normalize);

/// First-order step that changes the distance to prototype k by `delta_d`
/// while spending a controlled amount of motion orthogonal to the radial
/// direction. Writing x = z - w_k, d = ||x|| and c = ((d + delta_d)^2 -
/// d^2) / 2, the radial part is (c / d^2) x and the tangential part is an
/// isotropically random unit tangent scaled to ||radial|| *
/// sqrt(r_scale^2 - 1), so the full step has norm ||radial|| * r_scale.
/// Requires d > 0, d + delta_d >= 0 and r_scale >= 1. delta_d = 0 returns
/// the zero step without drawing from `rng`. In one dimension there is no
/// tangent space, so r_scale must equal 1.
Vector radial_tangential_step(const Vector& z, const PrototypeSet& som, int k,
                              double delta_d, double r_scale, Rng& rng);

} // namespace music
