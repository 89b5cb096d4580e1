#pragma once

#include "bubblelab/core/time_series.hpp"

namespace bubblelab {

/// Residuals of the OLS fit of y on (1, t). The fitted trend is removed; the
/// result keeps the original start_index and label. Residuals sum to zero and
/// are orthogonal to the time index (both to 1e-9 relative), and the
/// operation is idempotent. Throws a degenerate-input error for length < 3.
[[nodiscard]] TimeSeries detrend_linear(const TimeSeries& y);

}  // namespace bubblelab
