#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "bubblelab/core/csv.hpp"
#include "bubblelab/core/time_series.hpp"

namespace bubblelab::coint {

/// A fitted long-run (or first-difference) relation between a price series
/// and a set of covariates. Coefficient vectors cover the reported
/// coefficients only — the intercept (when fitted) and the level covariates —
/// never the lead/lag nuisance terms of a dynamic fit.
struct CointFit {
    std::vector<std::string> names;       ///< "intercept" first when one was fitted
    std::vector<double> coefficients;
    std::vector<double> hac_se;           ///< classical SEs for first_difference_fit
    std::vector<double> t_stats;          ///< coefficient / SE
    std::vector<double> p_values;         ///< two-sided, asymptotic normal
    double r_squared = 0.0;               ///< centered R^2 of the estimating regression
    double adj_r_squared = 0.0;

    /// Level residuals p_t - (intercept + beta'X_t) over the FULL input span,
    /// including the lead/lag trim: downstream explosiveness tests need the
    /// complete gap path, and the counterfactual uses only the level part.
    TimeSeries residuals;

    /// Exact OLS residuals of the estimating regression over its own (trimmed)
    /// sample. With an intercept these have mean zero by the normal equations;
    /// the full-span level residuals above do not, because the lead/lag terms
    /// are dropped from the level reconstruction.
    TimeSeries regression_residuals;

    std::size_t q_leads_lags = 0;
    std::size_t nw_bandwidth = 0;
    std::size_t nobs = 0;  ///< rows of the estimating regression
};

/// Dynamic OLS estimate of the cointegrating relation
///   p_t = a + beta'X_t + sum_{j=-q..q} g_j' dX_{t-j} + u_t,
/// fitted over the trimmed rows t in [q+1, T-1-q]. Reported standard errors
/// for the intercept and level coefficients are Newey-West with Bartlett
/// weights at the given bandwidth; R^2 comes from the full augmented
/// regression. Requires p and X aligned (same start index and length),
/// enough rows for the augmented design plus one residual degree of freedom,
/// and bandwidth < trimmed rows.
[[nodiscard]] CointFit dols_fit(const TimeSeries& p, const Frame& X, std::size_t q_leads_lags,
                                std::size_t nw_bandwidth);

/// First-difference estimate: OLS of dp_t on dX_t with NO intercept, so a
/// common deterministic drift must be carried by the covariates, not absorbed
/// silently. Residuals live on the differenced span (start + 1). The hac_se
/// field carries classical standard errors here: the estimator is an
/// auxiliary route whose innovations are treated as serially uncorrelated.
[[nodiscard]] CointFit first_difference_fit(const TimeSeries& p, const Frame& X);

/// Integrates a first-difference fit into a level counterfactual anchored at
/// `anchor_time`: fhat_{anchor} = p_{anchor}, then
/// fhat_t = fhat_{t-1} + alpha' dX_t for t > anchor_time. Requires the fit to
/// have been produced by first_difference_fit on covariates with these names.
[[nodiscard]] TimeSeries first_difference_counterfactual(const CointFit& fit, const TimeSeries& p,
                                                         const Frame& X, long anchor_time);

/// Coefficient table (variable, coef, se, t, p) for CSV emission.
[[nodiscard]] csv::Table fit_table(const CointFit& fit);

/// Writes fit_table(fit) to `path`.
void write_fit_csv(const std::string& path, const CointFit& fit);

}  // namespace bubblelab::coint
