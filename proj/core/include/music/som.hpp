#pragma once

#include "music/types.hpp"

#include <vector>

namespace music {

enum class Topology { Rectangular, Toroidal };

/// A trained self-organizing map: N = lattice_rows * lattice_cols prototype
/// vectors in R^D arranged on a 2-d lattice. Unit j sits at lattice position
/// (j / lattice_cols, j % lattice_cols); the mapping is bijective by
/// construction. `labels` is empty for unlabeled maps, otherwise one entry
/// per unit with -1 marking units that matched no training sample.
struct PrototypeSet {
  Matrix weights; // N x D, row j = prototype of unit j
  int lattice_rows = 0;
  int lattice_cols = 0;
  Topology topology = Topology::Rectangular;
  std::vector<int> labels;

  int units() const { return static_cast<int>(weights.rows()); }
  int dim() const { return static_cast<int>(weights.cols()); }

  int unit_row(int j) const { return j / lattice_cols; }
  int unit_col(int j) const { return j % lattice_cols; }
  int unit_index(int row, int col) const { return row * lattice_cols + col; }
};

/// Chebyshev distance between two units on the lattice, with per-axis
/// wraparound when the topology is toroidal.
int chebyshev_lattice_distance(const PrototypeSet& som, int i, int j);

/// Squared Euclidean distance between two lattice positions, with per-axis
/// wraparound when the topology is toroidal. Used by the training kernel.
double euclidean_lattice_distance_sq(const PrototypeSet& som, int i, int j);

struct SomTrainConfig {
  int epochs = 10;
  double rate_initial = 0.5;
  double rate_final = 0.02;
  /// Initial kernel radius in lattice units; a non-positive value selects
  /// max(lattice_rows, lattice_cols) / 2.
  double radius_initial = -1.0;
  double radius_final = 0.5;

  enum class Decay { Exponential, Linear };
  Decay decay = Decay::Exponential;

  enum class Init { RandomSample, PcaPlane };
  Init init = Init::RandomSample;

  std::uint64_t seed = 0;
};

/// Online Kohonen training: every epoch visits all samples in a freshly
/// shuffled order, pulls the best-matching unit and its lattice neighborhood
/// toward the sample with a Gaussian kernel on Euclidean lattice distance,
/// and decays rate and radius per the configured schedule. Deterministic
/// for a fixed config and seed. If `epoch_quantization_error` is non-null it
/// receives the mean distance from each sample to its best-matching unit,
/// measured after every epoch.
PrototypeSet train_som(const Matrix& data, int lattice_rows, int lattice_cols,
                       Topology topology, const SomTrainConfig& config,
                       std::vector<double>* epoch_quantization_error = nullptr);

/// Index of the unit whose prototype is nearest to z in Euclidean distance.
/// Ties break toward the lowest unit index.
int bmu(const Vector& z, const PrototypeSet& som);

/// All unit indices within Chebyshev lattice distance `radius` of `center`
/// (wraparound when toroidal), in ascending index order, `center` included.
std::vector<int> lattice_neighborhood(int center, int radius,
                                      const PrototypeSet& som);

/// Majority label of the samples mapped to each unit; -1 where no sample
/// mapped. Ties break toward the smallest label value.
std::vector<int> label_prototypes(const PrototypeSet& som, const Matrix& data,
                                  const std::vector<int>& labels);

/// Mean Euclidean distance from each sample (row of `data`) to its
/// best-matching prototype.
double quantization_error(const Matrix& data, const PrototypeSet& som);

} // namespace music
