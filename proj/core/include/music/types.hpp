#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace music {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Rng = std::mt19937_64;

/// Thrown when an operation is called with inputs that violate its contract
/// (dimension mismatch, parameter out of range, empty required input, ...).
class ContractError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when a normalized squared-distance Jacobian row is requested at a
/// point that coincides with the prototype, so the row direction is undefined.
class DegenerateRowError : public std::runtime_error {
public:
  DegenerateRowError(int unit, const std::string& what)
      : std::runtime_error(what), unit_(unit) {}

  /// Index of the prototype whose row could not be normalized.
  int unit() const noexcept { return unit_; }

private:
  int unit_;
};

} // namespace music
