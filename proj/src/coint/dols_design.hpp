#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <string>
#include <vector>

#include "bubblelab/core/time_series.hpp"

namespace bubblelab::coint::detail {

/// Assembled dynamic-OLS regression: p_t on [1, X_t, dX_{t-j} for j=-q..q]
/// over the trimmed rows t in [q+1, T-1-q]. Shared by the fit and the
/// stability statistic so both see byte-identical designs.
struct DolsDesign {
    Eigen::VectorXd y;
    Eigen::MatrixXd X;
    std::vector<std::string> names;
    std::size_t trim_start = 0;  ///< first trimmed row's position in the input (q+1)
    std::size_t n = 0;           ///< trimmed rows
    std::size_t m = 0;           ///< level covariates
};

/// Validates alignment and sample length, then builds the design. Columns:
/// intercept, the m levels, then difference blocks ordered lead-to-lag
/// (j = -q..q), covariates in frame order within each block.
[[nodiscard]] DolsDesign build_dols_design(const TimeSeries& p, const Frame& X, std::size_t q);

}  // namespace bubblelab::coint::detail
