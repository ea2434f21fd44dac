#pragma once

#include "music/types.hpp"

#include <cstdint>
#include <vector>

namespace music {

struct GmmSpec {
  Matrix means;                     // K x D
  std::vector<Matrix> covariances;  // K matrices, each D x D SPD
  Vector weights;                   // K entries, >= 0, summing to 1

  int components() const { return static_cast<int>(means.rows()); }
  int dim() const { return static_cast<int>(means.cols()); }

  /// Throws ContractError on inconsistent sizes, negative or non-unit-sum
  /// weights, or a covariance that is not positive definite.
  void validate() const;
};

struct GmmSample {
  Matrix data;                 // n x D
  std::vector<int> component;  // generating component per row
};

/// n i.i.d. draws from the mixture: categorical component choice by
/// cumulative weights, then mean + L g with L the Cholesky factor of the
/// component covariance. Deterministic for a fixed seed.
GmmSample gmm_sample(const GmmSpec& spec, int n, std::uint64_t seed);

/// Three equally weighted components whose means form an equilateral
/// triangle of side 6 in coordinates (0, 1) and are zero elsewhere.
/// Covariances are diagonal: variance 1 in the triangle plane and 0.05 in
/// every remaining coordinate.
GmmSpec triangle_gmm_spec(int dim = 10);

} // namespace music
