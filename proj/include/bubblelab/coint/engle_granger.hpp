#pragma once

#include <cstddef>

#include "bubblelab/core/time_series.hpp"
#include "bubblelab/regress/adf.hpp"

namespace bubblelab::coint {

/// Residual-based no-cointegration test. The null is "no cointegration", so
/// rejection (a sufficiently negative statistic) is evidence FOR a stable
/// long-run relation. Two decision rules are exposed side by side and neither
/// is chosen silently: response-surface critical values keyed by the number
/// of variables in the relation, and a flat -2.58 threshold some studies use
/// as a 1% rule of thumb.
struct EngleGrangerResult {
    regress::AdfResult adf;       ///< left-tailed, no intercept (input is a residual)
    std::size_t n_variables = 2;  ///< dependent + level covariates
    double cv_1 = 0.0;            ///< MacKinnon-style asymptotic critical values
    double cv_5 = 0.0;
    double cv_10 = 0.0;
    bool reject_1 = false;  ///< adf.t_stat < cv_1, and so on
    bool reject_5 = false;
    bool reject_10 = false;
    double flat_threshold = -2.58;
    bool reject_flat = false;  ///< adf.t_stat < flat_threshold
};

/// Augmented Dickey-Fuller test on a cointegrating residual with K lagged
/// differences and no deterministic terms (the residual is already centered
/// by the first-stage intercept). `n_variables` counts the series in the
/// long-run relation, dependent included (2..5 supported), and selects the
/// critical-value row.
[[nodiscard]] EngleGrangerResult engle_granger(const TimeSeries& residuals, std::size_t lag_K,
                                               std::size_t n_variables);

}  // namespace bubblelab::coint
