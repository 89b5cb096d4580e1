#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <string>
#include <vector>

#include "bubblelab/core/time_series.hpp"

namespace bubblelab::coint {

/// Principal components of a panel of series (e.g. price gaps across
/// markets): how much of the panel's co-movement one common factor explains.
struct PcaResult {
    /// Row i is the i-th component's loading vector across the input columns
    /// (rows are orthonormal). Sign convention: the largest-magnitude entry
    /// of each row is positive.
    Eigen::MatrixXd loadings;
    /// Eigenvalue shares, non-increasing, summing to 1.
    std::vector<double> variance_explained;
    /// Component scores ("pc1", "pc2", ...) on the input time index; their
    /// sample covariance is diagonal.
    Frame scores;
    std::vector<std::string> series_names;
};

/// Eigendecomposition of the column-demeaned sample covariance (correlation
/// when `standardize`). Requires at least two columns and more rows than
/// columns; a zero-variance column under standardization, or a panel with no
/// variance at all, raises a degenerate-covariance error.
[[nodiscard]] PcaResult pca(const Frame& gaps, bool standardize = false);

}  // namespace bubblelab::coint
