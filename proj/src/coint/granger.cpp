#include "bubblelab/coint/granger.hpp"

#include <Eigen/Dense>
#include <boost/math/distributions/fisher_f.hpp>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "bubblelab/core/parallel.hpp"
#include "bubblelab/errors.hpp"
#include "bubblelab/regress/ols.hpp"

namespace bubblelab::coint {

namespace {

/// Builds the lag design [1, y_{t-1..t-L}, (x_{t-1..t-L})] on the common
/// sample t = t0..T-1. Pass include_x = false for the restricted design.
Eigen::MatrixXd lag_design(const std::vector<double>& y, const std::vector<double>& x,
                           std::size_t t0, std::size_t L, bool include_x) {
    const std::size_t n = y.size() - t0;
    const std::size_t cols = 1 + L + (include_x ? L : 0);
    Eigen::MatrixXd X(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t t = t0 + i;
        const auto row = static_cast<Eigen::Index>(i);
        X(row, 0) = 1.0;
        for (std::size_t l = 1; l <= L; ++l) {
            X(row, static_cast<Eigen::Index>(l)) = y[t - l];
            if (include_x) X(row, static_cast<Eigen::Index>(L + l)) = x[t - l];
        }
    }
    return X;
}

std::vector<std::string> lag_names(const std::string& y_label, const std::string& x_label,
                                   std::size_t L, bool include_x) {
    std::vector<std::string> names{"intercept"};
    for (std::size_t l = 1; l <= L; ++l) names.push_back(y_label + "_lag" + std::to_string(l));
    if (include_x) {
        for (std::size_t l = 1; l <= L; ++l) names.push_back(x_label + "_lag" + std::to_string(l));
    }
    return names;
}

/// RSS of y regressed on a design with precomputed thin orthonormal basis Q.
double rss_via_q(const Eigen::MatrixXd& Q, const Eigen::VectorXd& y) {
    return y.squaredNorm() - (Q.transpose() * y).squaredNorm();
}

}  // namespace

GrangerResult granger_test(const TimeSeries& x, const TimeSeries& y, std::size_t max_lag,
                           std::size_t n_boot, RngStream& stream, unsigned n_workers) {
    x.require_valid(2);
    y.require_valid(2);
    if (x.start_index != y.start_index || x.size() != y.size()) {
        throw data_error("alignment", "cause and effect series must share start index and length");
    }
    if (max_lag < 1) {
        throw usage_error("invalid_config", "max_lag must be at least 1");
    }
    if (n_boot < 1) {
        throw usage_error("invalid_config", "need at least one bootstrap replication");
    }
    const std::size_t T = y.size();
    // Largest candidate design has 1 + 2*max_lag columns on T - max_lag rows.
    if (T <= 3 * max_lag + 2) {
        throw data_error("insufficient_sample",
                         std::to_string(T) + " observations cannot support lag order " +
                             std::to_string(max_lag));
    }

    const std::size_t t0 = max_lag;  // common sample for every candidate L
    const std::size_t n = T - t0;
    Eigen::VectorXd y_trim(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) y_trim(static_cast<Eigen::Index>(i)) = y.values[t0 + i];

    // BIC over the unrestricted regression; ties break to the smaller L.
    std::size_t best_L = 1;
    double best_bic = std::numeric_limits<double>::infinity();
    for (std::size_t L = 1; L <= max_lag; ++L) {
        const Eigen::MatrixXd Xu = lag_design(y.values, x.values, t0, L, true);
        const regress::OlsFit fit =
            regress::ols(y_trim, Xu, lag_names(y.label, x.label, L, true));
        const double rss = fit.residuals.squaredNorm();
        if (!(rss > 0.0)) {
            throw numeric_error("singular_design", "perfect fit leaves no residual variance");
        }
        const auto k = static_cast<double>(Xu.cols());
        const double bic = static_cast<double>(n) * std::log(rss / static_cast<double>(n)) +
                           k * std::log(static_cast<double>(n));
        if (bic < best_bic) {
            best_bic = bic;
            best_L = L;
        }
    }

    const std::size_t L = best_L;
    const Eigen::MatrixXd Xu = lag_design(y.values, x.values, t0, L, true);
    const Eigen::MatrixXd Xr = lag_design(y.values, x.values, t0, L, false);
    const regress::OlsFit fit_u = regress::ols(y_trim, Xu, lag_names(y.label, x.label, L, true));
    const regress::OlsFit fit_r = regress::ols(y_trim, Xr, lag_names(y.label, x.label, L, false));

    const double rss_u = fit_u.residuals.squaredNorm();
    const double rss_r = fit_r.residuals.squaredNorm();
    const auto df2 = static_cast<double>(n - (2 * L + 1));
    if (!(rss_u > 0.0) || df2 <= 0.0) {
        throw numeric_error("singular_design", "unrestricted regression has no residual variance");
    }
    const double f_stat = ((rss_r - rss_u) / static_cast<double>(L)) / (rss_u / df2);

    GrangerResult out;
    out.f_stat = f_stat;
    out.lag_order = L;
    out.cause = x.label;
    out.effect = y.label;
    out.nobs = n;

    const boost::math::fisher_f f_dist(static_cast<double>(L), df2);
    out.p_standard = boost::math::cdf(boost::math::complement(f_dist, std::max(f_stat, 0.0)));

    // Wild bootstrap under the restricted model: y* = fitted_r + w .* resid_r
    // with Rademacher w. Signs are pre-drawn in replication order from the
    // caller's stream, so replication refits can run on any worker count
    // without changing the result.
    const Eigen::VectorXd fitted_r = y_trim - fit_r.residuals;
    std::vector<signed char> signs(n_boot * n);
    for (auto& s : signs) s = static_cast<signed char>(stream.rademacher());

    // Thin orthonormal bases make each replication two projections.
    const auto ku = Xu.cols();
    const auto kr = Xr.cols();
    const Eigen::MatrixXd Qu =
        Eigen::HouseholderQR<Eigen::MatrixXd>(Xu).householderQ() *
        Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n), ku);
    const Eigen::MatrixXd Qr =
        Eigen::HouseholderQR<Eigen::MatrixXd>(Xr).householderQ() *
        Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n), kr);

    std::vector<unsigned char> exceed(n_boot, 0);
    parallel_for(n_boot, n_workers, [&](std::size_t rep) {
        Eigen::VectorXd y_star(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i) {
            const auto idx = static_cast<Eigen::Index>(i);
            y_star(idx) = fitted_r(idx) +
                          static_cast<double>(signs[rep * n + i]) * fit_r.residuals(idx);
        }
        const double b_rss_u = rss_via_q(Qu, y_star);
        const double b_rss_r = rss_via_q(Qr, y_star);
        if (!(b_rss_u > 0.0)) {
            throw numeric_error("singular_design", "bootstrap replication left no variance");
        }
        const double b_f = ((b_rss_r - b_rss_u) / static_cast<double>(L)) / (b_rss_u / df2);
        exceed[rep] = b_f >= f_stat ? 1 : 0;
    });

    std::size_t count = 0;
    for (const auto e : exceed) count += e;
    out.p_bootstrap =
        (1.0 + static_cast<double>(count)) / (1.0 + static_cast<double>(n_boot));
    return out;
}

}  // namespace bubblelab::coint
