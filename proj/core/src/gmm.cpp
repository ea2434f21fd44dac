#include "music/gmm.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace music {

void GmmSpec::validate() const {
  const int k = components();
  const int d = dim();
  if (k < 1 || d < 1) throw ContractError("GmmSpec: empty mixture");
  if (static_cast<int>(covariances.size()) != k)
    throw ContractError("GmmSpec: one covariance per component required");
  if (weights.size() != k)
    throw ContractError("GmmSpec: one weight per component required");
  double sum = 0.0;
  for (int i = 0; i < k; ++i) {
    if (weights[i] < 0.0) throw ContractError("GmmSpec: negative weight");
    sum += weights[i];
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw ContractError("GmmSpec: weights must sum to 1");
  for (const Matrix& cov : covariances) {
    if (cov.rows() != d || cov.cols() != d)
      throw ContractError("GmmSpec: covariance dimension mismatch");
    if (Eigen::LLT<Matrix>(cov).info() != Eigen::Success)
      throw ContractError("GmmSpec: covariance is not positive definite");
  }
}

GmmSample gmm_sample(const GmmSpec& spec, int n, std::uint64_t seed) {
  spec.validate();
  if (n < 1) throw ContractError("gmm_sample: n must be >= 1");

  const int k = spec.components();
  const int d = spec.dim();
  std::vector<Matrix> chol(k);
  for (int i = 0; i < k; ++i)
    chol[i] = Eigen::LLT<Matrix>(spec.covariances[i]).matrixL();

  Rng rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  GmmSample sample;
  sample.data.resize(n, d);
  sample.component.resize(n);
  for (int i = 0; i < n; ++i) {
    // Cumulative-weight walk keeps the categorical draw reproducible.
    const double u = unif(rng);
    int c = k - 1;
    double acc = 0.0;
    for (int j = 0; j < k; ++j) {
      acc += spec.weights[j];
      if (u < acc) {
        c = j;
        break;
      }
    }
    Vector g(d);
    for (int j = 0; j < d; ++j) g[j] = gauss(rng);
    sample.data.row(i) =
        (spec.means.row(c).transpose() + chol[c] * g).transpose();
    sample.component[i] = c;
  }
  return sample;
}

GmmSpec triangle_gmm_spec(int dim) {
  if (dim < 2) throw ContractError("triangle_gmm_spec: dim must be >= 2");
  const double side = 6.0;
  const double r = side / std::sqrt(3.0); // circumradius of the triangle

  GmmSpec spec;
  spec.means = Matrix::Zero(3, dim);
  spec.means(0, 0) = 0.0;
  spec.means(0, 1) = r;
  spec.means(1, 0) = -side / 2.0;
  spec.means(1, 1) = -r / 2.0;
  spec.means(2, 0) = side / 2.0;
  spec.means(2, 1) = -r / 2.0;

  Vector diag = Vector::Constant(dim, 0.05);
  diag[0] = 1.0;
  diag[1] = 1.0;
  spec.covariances.assign(3, Matrix(diag.asDiagonal()));
  spec.weights = Vector::Constant(3, 1.0 / 3.0);
  return spec;
}

} // namespace music
