#include "music/whitening.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace music {

WhiteningTransform pca_whiten_fit(const Matrix& data, double eps) {
  if (data.rows() < 2)
    throw ContractError("pca_whiten_fit: at least 2 samples required");
  if (eps <= 0.0) throw ContractError("pca_whiten_fit: eps must be > 0");

  WhiteningTransform t;
  t.eps = eps;
  t.mean = data.colwise().mean().transpose();
  const Matrix centered = data.rowwise() - t.mean.transpose();
  const Matrix cov = centered.transpose() * centered /
                     static_cast<double>(data.rows() - 1);

  Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
  if (eig.info() != Eigen::Success)
    throw std::runtime_error("pca_whiten_fit: eigendecomposition failed");

  Vector floored = eig.eigenvalues().cwiseMax(eps);
  const Vector inv_sqrt = floored.cwiseSqrt().cwiseInverse();
  t.forward = inv_sqrt.asDiagonal() * eig.eigenvectors().transpose();
  t.inverse = eig.eigenvectors() * floored.cwiseSqrt().asDiagonal();
  return t;
}

Vector pca_whiten_apply(const WhiteningTransform& transform, const Vector& x,
                        WhitenDirection direction) {
  if (direction == WhitenDirection::Forward) {
    if (x.size() != transform.mean.size())
      throw ContractError("pca_whiten_apply: dimension mismatch");
    return transform.forward * (x - transform.mean);
  }
  if (x.size() != transform.inverse.cols())
    throw ContractError("pca_whiten_apply: dimension mismatch");
  return transform.inverse * x + transform.mean;
}

Matrix pca_whiten_apply(const WhiteningTransform& transform, const Matrix& X,
                        WhitenDirection direction) {
  Matrix out(X.rows(), X.cols());
  for (int i = 0; i < X.rows(); ++i)
    out.row(i) =
        pca_whiten_apply(transform, Vector(X.row(i).transpose()), direction)
            .transpose();
  return out;
}

Standardizer standardizer_fit(const Matrix& data) {
  if (data.rows() < 2)
    throw ContractError("standardizer_fit: at least 2 samples required");
  Standardizer s;
  s.mean = data.colwise().mean().transpose();
  const Matrix centered = data.rowwise() - s.mean.transpose();
  s.scale.resize(data.cols());
  for (int j = 0; j < data.cols(); ++j) {
    const double var = centered.col(j).squaredNorm() /
                       static_cast<double>(data.rows() - 1);
    s.scale[j] = var > 0.0 ? 1.0 / std::sqrt(var) : 1.0;
  }
  return s;
}

Matrix standardize(const Standardizer& s, const Matrix& data) {
  if (data.cols() != s.mean.size())
    throw ContractError("standardize: dimension mismatch");
  return (data.rowwise() - s.mean.transpose()) * s.scale.asDiagonal();
}

Vector standardize(const Standardizer& s, const Vector& x) {
  if (x.size() != s.mean.size())
    throw ContractError("standardize: dimension mismatch");
  return (x - s.mean).cwiseProduct(s.scale);
}

} // namespace music
