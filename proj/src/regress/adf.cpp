#include "bubblelab/regress/adf.hpp"

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "bubblelab/errors.hpp"
#include "bubblelab/regress/ols.hpp"

namespace bubblelab::regress {

AdfResult adf_t_stat(const TimeSeries& y, std::size_t r1, std::size_t r2, std::size_t K,
                     bool include_intercept) {
    if (r2 >= y.size() || r1 > r2) {
        throw data_error("index_out_of_range",
                         "window [" + std::to_string(r1) + ", " + std::to_string(r2) +
                             "] invalid for series of length " + std::to_string(y.size()));
    }
    const std::size_t len = r2 - r1 + 1;
    if (len < 2 * K + 4) {
        throw data_error("window_too_short",
                         "window has " + std::to_string(len) + " observations; need at least " +
                             std::to_string(2 * K + 4) + " for " + std::to_string(K) + " lags");
    }

    const std::size_t n = len - 1 - K;  // usable regression rows
    const std::size_t n_det = include_intercept ? 1 : 0;
    const std::size_t p = K + 1 + n_det;  // [intercept,] lagged level, K lagged differences

    Eigen::VectorXd dy(static_cast<Eigen::Index>(n));
    Eigen::MatrixXd X(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
    std::vector<std::string> names;
    names.reserve(p);
    if (include_intercept) names.emplace_back("intercept");
    names.emplace_back("lag_level");
    for (std::size_t k = 1; k <= K; ++k) names.push_back("dlag" + std::to_string(k));

    const auto& v = y.values;
    const auto level_col = static_cast<Eigen::Index>(n_det);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t t = r1 + K + 1 + i;
        dy(static_cast<Eigen::Index>(i)) = v[t] - v[t - 1];
        if (include_intercept) X(static_cast<Eigen::Index>(i), 0) = 1.0;
        X(static_cast<Eigen::Index>(i), level_col) = v[t - 1];
        for (std::size_t k = 1; k <= K; ++k) {
            X(static_cast<Eigen::Index>(i), level_col + static_cast<Eigen::Index>(k)) =
                v[t - k] - v[t - k - 1];
        }
    }

    const OlsFit fit = ols(dy, X, names);
    AdfResult out;
    out.beta_hat = fit.coefficients(level_col);
    const double se = fit.stderr_classical(level_col);
    if (!(se > 0.0) || !std::isfinite(se)) {
        throw numeric_error("singular_design",
                            "zero-variance lagged level in window [" + std::to_string(r1) + ", " +
                                std::to_string(r2) + "]");
    }
    out.t_stat = out.beta_hat / se;
    if (!std::isfinite(out.t_stat)) {
        throw numeric_error("singular_design", "non-finite ADF statistic");
    }
    out.lag_order = K;
    out.r1 = r1;
    out.r2 = r2;
    return out;
}

}  // namespace bubblelab::regress
