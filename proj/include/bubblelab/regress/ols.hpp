#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <string>
#include <vector>

namespace bubblelab::regress {

/// Ordinary-least-squares fit. Residuals are orthogonal to every design
/// column; `xtx_inverse` is kept so HAC covariance can be assembled without
/// refactorizing.
struct OlsFit {
    Eigen::VectorXd coefficients;
    Eigen::VectorXd residuals;
    Eigen::VectorXd stderr_classical;
    double sigma2 = 0.0;     ///< RSS / (n - p)
    double r_squared = 0.0;  ///< centered; in [0,1] whenever X spans a constant
    std::size_t nobs = 0;
    Eigen::MatrixXd xtx_inverse;
};

/// OLS of y on the columns of X via Householder QR (orthogonal decomposition:
/// windows can be short, so the normal equations are never formed for the
/// solve). A diagonal ratio of the R factor above 1e12 raises a
/// singular-design error naming the dependent columns — `column_names`, when
/// given, supplies those names. Requires rows(X) == len(y) and rows > cols.
[[nodiscard]] OlsFit ols(const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
                         const std::vector<std::string>& column_names = {});

/// Newey–West HAC standard errors for an existing fit: Bartlett weights
/// w_j = 1 - j/(bandwidth+1); bandwidth 0 degenerates to White
/// heteroskedasticity-robust errors (no small-sample adjustment).
/// Requires bandwidth < nobs.
[[nodiscard]] Eigen::VectorXd newey_west_se(const OlsFit& fit, const Eigen::MatrixXd& X,
                                            std::size_t bandwidth);

}  // namespace bubblelab::regress
