#include "music/stats.hpp"

#include <algorithm>
#include <cmath>

namespace music {

double quantile(std::vector<double> values, double p) {
  if (values.empty()) throw ContractError("quantile: empty sample");
  if (p < 0.0 || p > 1.0) throw ContractError("quantile: p outside [0, 1]");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * p;
  const auto lo = static_cast<size_t>(std::floor(h));
  if (lo + 1 >= values.size()) return values.back();
  const double frac = h - static_cast<double>(lo);
  return values[lo] + frac * (values[lo + 1] - values[lo]);
}

double median(std::vector<double> values) {
  return quantile(std::move(values), 0.5);
}

double iqr(std::vector<double> values) {
  const double q1 = quantile(values, 0.25);
  const double q3 = quantile(std::move(values), 0.75);
  return q3 - q1;
}

} // namespace music
