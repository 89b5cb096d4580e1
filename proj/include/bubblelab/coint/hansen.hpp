#pragma once

#include <cstddef>

#include "bubblelab/core/time_series.hpp"

namespace bubblelab::coint {

/// Hansen (1992) L_c parameter-stability statistic for a cointegrating
/// regression. The null is a STABLE long-run relation; large values reject
/// stability, so a small statistic is evidence that one set of level
/// coefficients spans the whole sample.
struct HansenResult {
    double lc = 0.0;
    /// Interpolated asymptotic p-value. When the statistic falls outside the
    /// tabulated range the value is clamped to the nearest bound and the
    /// corresponding flag below is set: a clamped 0.20 means "p > 0.20", a
    /// clamped 0.001 means "p < 0.001".
    double p_value = 1.0;
    bool p_below_table = false;  ///< statistic under the smallest tabulated CV (p > 0.20)
    bool p_above_table = false;  ///< statistic over the largest tabulated CV (p < 0.001)
    double cv_5 = 0.0;           ///< 5% critical value for this covariate count
    double cv_1 = 0.0;
    std::size_t m_covariates = 0;
};

/// Computes L_c from the dynamic-OLS fit of p on X with q leads/lags:
/// scores are the level-covariate first-order conditions s_t = x_t * u_t
/// (m-vectors over the trimmed sample; they sum to zero exactly because the
/// levels are regressors), S_t their running sum, V the Bartlett long-run
/// covariance of s_t at the given bandwidth, and
///   L_c = n^-2 * sum_t S_t' V^-1 S_t.
/// The statistic is invariant to positive rescaling of any covariate. The
/// p-value table covers 1..5 covariates; other counts raise a usage error,
/// and a numerically singular V raises a degenerate-covariance error.
[[nodiscard]] HansenResult hansen_lc(const TimeSeries& p, const Frame& X,
                                     std::size_t q_leads_lags, std::size_t nw_bandwidth);

}  // namespace bubblelab::coint
