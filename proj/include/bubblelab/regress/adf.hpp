#pragma once

#include <cstddef>

#include "bubblelab/core/time_series.hpp"

namespace bubblelab::regress {

/// Right-tailed augmented Dickey–Fuller statistic on one subsample window.
struct AdfResult {
    double beta_hat = 0.0;  ///< coefficient on the lagged level
    double t_stat = 0.0;    ///< beta_hat / classical SE(beta_hat)
    std::size_t lag_order = 0;
    std::size_t r1 = 0;  ///< window start, 0-based position within the series
    std::size_t r2 = 0;  ///< window end, inclusive
};

/// Fits Dy_t = a + b*y_{t-1} + sum_{k=1..K} g_k Dy_{t-k} + u_t over the
/// observations at positions [r1, r2] of `y` (differences and lags are taken
/// inside the window only) and returns the t-statistic on b with classical
/// standard errors. Intercept, no linear trend; detrending happens before the
/// test, never inside it.
///
/// `include_intercept = false` drops the constant, the form used when the
/// input is already a regression residual (cointegration residual tests);
/// explosiveness scans keep the default.
///
/// The regression uses rows t = r1+K+1..r2, i.e. n = len-1-K rows for K+2
/// coefficients (K+1 without the intercept), so the window length must be at
/// least 2K+4 for one residual degree of freedom; shorter windows raise a
/// window-too-short error. A window whose lagged level has zero variance
/// raises a singular-design error, never a silent infinite statistic.
[[nodiscard]] AdfResult adf_t_stat(const TimeSeries& y, std::size_t r1, std::size_t r2,
                                   std::size_t K, bool include_intercept = true);

}  // namespace bubblelab::regress
