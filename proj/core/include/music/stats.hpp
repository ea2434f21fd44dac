#pragma once

#include "music/types.hpp"

#include <vector>

namespace music {

/// Linear-interpolation quantile of an unsorted sample: index h = (n-1) p,
/// value = x[floor(h)] + frac(h) * (x[floor(h)+1] - x[floor(h)]) on the
/// sorted copy. p must lie in [0, 1]; the sample must be non-empty.
double quantile(std::vector<double> values, double p);

double median(std::vector<double> values);

/// Q3 - Q1 with linear-interpolation quantiles.
double iqr(std::vector<double> values);

} // namespace music
