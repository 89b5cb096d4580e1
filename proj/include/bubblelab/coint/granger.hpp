#pragma once

#include <cstddef>
#include <string>

#include "bubblelab/core/rng.hpp"
#include "bubblelab/core/time_series.hpp"

namespace bubblelab::coint {

/// Granger-causality F-test of "x does not help predict y" with a wild
/// bootstrap alternative to the classical F p-value.
struct GrangerResult {
    double f_stat = 0.0;
    double p_standard = 1.0;   ///< classical F(L, n - 2L - 1) upper tail
    double p_bootstrap = 1.0;  ///< wild bootstrap, (1 + #{F* >= F}) / (1 + n_boot)
    std::size_t lag_order = 0; ///< BIC-selected L in [1, max_lag]
    std::string cause;         ///< label of x
    std::string effect;        ///< label of y
    std::size_t nobs = 0;      ///< regression rows (common sample, T - max_lag)
};

/// Tests whether lags of x improve the prediction of y. The unrestricted
/// regression is y_t on [1, y_{t-1..t-L}, x_{t-1..t-L}]; L is chosen by BIC
/// over 1..max_lag on the common sample t = max_lag..T-1 (ties go to the
/// smaller L, so selection is deterministic), and the same common sample is
/// kept for the F-test and the bootstrap so every candidate sees identical
/// rows. The wild bootstrap regenerates y_t* = fitted_restricted_t + w_t *
/// resid_restricted_t with Rademacher w drawn from `stream` (all signs are
/// pre-drawn in replication order, so the result is invariant to
/// worker count), then recomputes F on the fixed designs.
///
/// Alignment (same start and length), max_lag >= 1, enough rows for the
/// largest candidate design, and n_boot >= 1 are required; constant series
/// surface as singular-design errors rather than silent p-values.
[[nodiscard]] GrangerResult granger_test(const TimeSeries& x, const TimeSeries& y,
                                         std::size_t max_lag, std::size_t n_boot,
                                         RngStream& stream, unsigned n_workers = 1);

}  // namespace bubblelab::coint
