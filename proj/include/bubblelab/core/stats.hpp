#pragma once

#include <cstddef>
#include <vector>

namespace bubblelab {

[[nodiscard]] double mean(const std::vector<double>& x);

/// Unbiased sample variance (divides by n-1). Requires n >= 2.
[[nodiscard]] double sample_variance(const std::vector<double>& x);

/// Linear-interpolation empirical quantile (R type 7): h = (n-1)q,
/// x[floor(h)] + frac(h) * (x[floor(h)+1] - x[floor(h)]) on the sorted
/// sample. q = 0.5 returns the textbook median. Requires non-empty x and
/// q in [0, 1].
[[nodiscard]] double quantile_type7(std::vector<double> x, double q);

}  // namespace bubblelab
