#include "music/som.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace music {

namespace {

int wrapped_axis_delta(int a, int b, int extent, bool wrap) {
  int d = std::abs(a - b);
  if (wrap) d = std::min(d, extent - d);
  return d;
}

void check_unit_index(const PrototypeSet& som, int j, const char* who) {
  if (j < 0 || j >= som.units())
    throw ContractError(std::string(who) + ": unit index out of range");
}

double schedule_value(double v0, double v1, std::int64_t step,
                      std::int64_t total, SomTrainConfig::Decay decay) {
  if (total <= 1) return v1;
  const double t = static_cast<double>(step) / static_cast<double>(total - 1);
  if (decay == SomTrainConfig::Decay::Linear) return v0 + (v1 - v0) * t;
  return v0 * std::pow(v1 / v0, t);
}

} // namespace

int chebyshev_lattice_distance(const PrototypeSet& som, int i, int j) {
  check_unit_index(som, i, "chebyshev_lattice_distance");
  check_unit_index(som, j, "chebyshev_lattice_distance");
  const bool wrap = som.topology == Topology::Toroidal;
  const int dr = wrapped_axis_delta(som.unit_row(i), som.unit_row(j),
                                    som.lattice_rows, wrap);
  const int dc = wrapped_axis_delta(som.unit_col(i), som.unit_col(j),
                                    som.lattice_cols, wrap);
  return std::max(dr, dc);
}

double euclidean_lattice_distance_sq(const PrototypeSet& som, int i, int j) {
  check_unit_index(som, i, "euclidean_lattice_distance_sq");
  check_unit_index(som, j, "euclidean_lattice_distance_sq");
  const bool wrap = som.topology == Topology::Toroidal;
  const double dr = wrapped_axis_delta(som.unit_row(i), som.unit_row(j),
                                       som.lattice_rows, wrap);
  const double dc = wrapped_axis_delta(som.unit_col(i), som.unit_col(j),
                                       som.lattice_cols, wrap);
  return dr * dr + dc * dc;
}

int bmu(const Vector& z, const PrototypeSet& som) {
  if (som.units() == 0) throw ContractError("bmu: empty prototype set");
  if (z.size() != som.dim())
    throw ContractError("bmu: query dimension does not match prototypes");
  // d_j^2 = ||w_j||^2 - 2 w_j.z + ||z||^2; the ||z||^2 term is common.
  Vector scores = som.weights.rowwise().squaredNorm() - 2.0 * (som.weights * z);
  int best = 0;
  for (int j = 1; j < scores.size(); ++j)
    if (scores[j] < scores[best]) best = j;
  return best;
}

std::vector<int> lattice_neighborhood(int center, int radius,
                                      const PrototypeSet& som) {
  check_unit_index(som, center, "lattice_neighborhood");
  if (radius < 0) throw ContractError("lattice_neighborhood: negative radius");
  std::vector<int> out;
  for (int j = 0; j < som.units(); ++j)
    if (chebyshev_lattice_distance(som, center, j) <= radius)
      out.push_back(j);
  return out;
}

std::vector<int> label_prototypes(const PrototypeSet& som, const Matrix& data,
                                  const std::vector<int>& labels) {
  if (static_cast<int>(labels.size()) != data.rows())
    throw ContractError("label_prototypes: one label per data row required");
  if (data.cols() != som.dim())
    throw ContractError("label_prototypes: data dimension mismatch");

  std::vector<std::map<int, int>> counts(som.units());
  for (int i = 0; i < data.rows(); ++i) {
    const Vector x = data.row(i).transpose();
    ++counts[bmu(x, som)][labels[i]];
  }

  std::vector<int> out(som.units(), -1);
  for (int j = 0; j < som.units(); ++j) {
    int best_count = 0;
    for (const auto& [label, count] : counts[j]) {
      if (count > best_count) { // map iteration is ascending, ties keep the
        best_count = count;     // smallest label
        out[j] = label;
      }
    }
  }
  return out;
}

double quantization_error(const Matrix& data, const PrototypeSet& som) {
  if (data.rows() == 0) throw ContractError("quantization_error: empty data");
  double total = 0.0;
  for (int i = 0; i < data.rows(); ++i) {
    const Vector x = data.row(i).transpose();
    total += (som.weights.row(bmu(x, som)) - data.row(i)).norm();
  }
  return total / static_cast<double>(data.rows());
}

PrototypeSet train_som(const Matrix& data, int lattice_rows, int lattice_cols,
                       Topology topology, const SomTrainConfig& config,
                       std::vector<double>* epoch_quantization_error) {
  if (data.rows() < 1 || data.cols() < 1)
    throw ContractError("train_som: empty training data");
  if (!data.allFinite())
    throw ContractError("train_som: training data must be finite");
  if (lattice_rows < 1 || lattice_cols < 1)
    throw ContractError("train_som: lattice must be at least 1x1");
  if (config.epochs < 1) throw ContractError("train_som: epochs must be >= 1");
  if (config.rate_final <= 0.0 || config.rate_initial < config.rate_final)
    throw ContractError("train_som: need rate_initial >= rate_final > 0");

  const double radius0 = config.radius_initial > 0.0
                             ? config.radius_initial
                             : std::max(lattice_rows, lattice_cols) / 2.0;
  if (config.radius_final <= 0.0 || radius0 < config.radius_final)
    throw ContractError("train_som: need radius_initial >= radius_final > 0");

  const int n_units = lattice_rows * lattice_cols;
  const int n_samples = static_cast<int>(data.rows());
  const int dim = static_cast<int>(data.cols());

  PrototypeSet som;
  som.lattice_rows = lattice_rows;
  som.lattice_cols = lattice_cols;
  som.topology = topology;
  som.weights.resize(n_units, dim);

  Rng rng(config.seed);

  if (config.init == SomTrainConfig::Init::RandomSample) {
    std::uniform_int_distribution<int> pick(0, n_samples - 1);
    for (int j = 0; j < n_units; ++j) som.weights.row(j) = data.row(pick(rng));
  } else {
    // Spread the lattice over the plane of the two leading principal
    // components, two standard deviations out on each side.
    const Vector mean = data.colwise().mean().transpose();
    const Matrix centered = data.rowwise() - mean.transpose();
    const Matrix cov =
        centered.transpose() * centered / std::max(1, n_samples - 1);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
    const int last = dim - 1;
    const Vector u1 = eig.eigenvectors().col(last);
    const Vector u2 = dim > 1 ? Vector(eig.eigenvectors().col(last - 1))
                              : Vector(Vector::Zero(dim));
    const double s1 = std::sqrt(std::max(0.0, eig.eigenvalues()[last]));
    const double s2 =
        dim > 1 ? std::sqrt(std::max(0.0, eig.eigenvalues()[last - 1])) : 0.0;
    for (int j = 0; j < n_units; ++j) {
      const double cn =
          lattice_cols > 1
              ? -1.0 + 2.0 * (j % lattice_cols) / (lattice_cols - 1)
              : 0.0;
      const double rn =
          lattice_rows > 1
              ? -1.0 + 2.0 * (j / lattice_cols) / (lattice_rows - 1)
              : 0.0;
      som.weights.row(j) =
          (mean + cn * 2.0 * s1 * u1 + rn * 2.0 * s2 * u2).transpose();
    }
  }

  // Pairwise squared Euclidean lattice distances, fixed for the whole run.
  Matrix lat_d2(n_units, n_units);
  for (int i = 0; i < n_units; ++i)
    for (int j = 0; j < n_units; ++j)
      lat_d2(i, j) = euclidean_lattice_distance_sq(som, i, j);

  Vector sq_norms = som.weights.rowwise().squaredNorm();
  std::vector<int> order(n_samples);
  std::iota(order.begin(), order.end(), 0);

  const std::int64_t total_steps =
      static_cast<std::int64_t>(config.epochs) * n_samples;
  std::int64_t step = 0;
  std::vector<int> touched;
  touched.reserve(n_units);

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (int i = 0; i < n_samples; ++i, ++step) {
      const double rate = schedule_value(config.rate_initial,
                                         config.rate_final, step, total_steps,
                                         config.decay);
      const double radius =
          schedule_value(radius0, config.radius_final, step, total_steps,
                         config.decay);
      const double inv_two_sigma2 = 1.0 / (2.0 * radius * radius);

      const Vector x = data.row(order[i]).transpose();
      Vector scores = sq_norms - 2.0 * (som.weights * x);
      int best = 0;
      for (int j = 1; j < n_units; ++j)
        if (scores[j] < scores[best]) best = j;

      // Kernel values below 1e-12 move prototypes by less than rounding
      // noise; skip those rows entirely.
      const double d2_cut = 2.0 * radius * radius * 12.0 * std::log(10.0);
      touched.clear();
      for (int j = 0; j < n_units; ++j)
        if (lat_d2(best, j) <= d2_cut) touched.push_back(j);
      for (int j : touched) {
        const double k =
            rate * std::exp(-lat_d2(best, j) * inv_two_sigma2);
        som.weights.row(j) += k * (x.transpose() - som.weights.row(j));
        sq_norms[j] = som.weights.row(j).squaredNorm();
      }
    }
    if (epoch_quantization_error)
      epoch_quantization_error->push_back(quantization_error(data, som));
  }

  if (!som.weights.allFinite())
    throw std::runtime_error("train_som: non-finite prototype produced");
  return som;
}

} // namespace music
