#pragma once

#include "music/types.hpp"

namespace music {

/// Full-dimensional PCA whitening: forward maps x to
/// diag(max(lambda_i, eps))^{-1/2} V^T (x - mean) with (V, lambda) the
/// eigensystem of the sample covariance (M - 1 normalization). The floor eps
/// keeps near-null directions finite; inverse exactly undoes forward in all
/// directions regardless of flooring.
struct WhiteningTransform {
  Vector mean;
  Matrix forward;
  Matrix inverse;
  double eps = 0.0;
};

enum class WhitenDirection { Forward, Inverse };

/// Fit on data rows. Requires at least 2 rows and eps > 0.
WhiteningTransform pca_whiten_fit(const Matrix& data, double eps);

Vector pca_whiten_apply(const WhiteningTransform& transform, const Vector& x,
                        WhitenDirection direction);

/// Row-wise batch form.
Matrix pca_whiten_apply(const WhiteningTransform& transform, const Matrix& X,
                        WhitenDirection direction);

/// Per-coordinate z-scoring, the light-weight preprocessing used by the
/// mixture-model experiments. Zero-variance coordinates keep scale 1.
struct Standardizer {
  Vector mean;
  Vector scale; // multiplicative factor applied after centering
};

Standardizer standardizer_fit(const Matrix& data);
Matrix standardize(const Standardizer& s, const Matrix& data);
Vector standardize(const Standardizer& s, const Vector& x);

} // namespace music
