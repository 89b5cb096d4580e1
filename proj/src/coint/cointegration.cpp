#include "bubblelab/coint/cointegration.hpp"

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "bubblelab/errors.hpp"
#include "bubblelab/regress/ols.hpp"
#include "dols_design.hpp"

namespace bubblelab::coint {

namespace detail {

DolsDesign build_dols_design(const TimeSeries& p, const Frame& X, std::size_t q) {
    p.require_valid(2);
    X.require_valid();
    if (X.n_cols() == 0) {
        throw usage_error("invalid_config", "dols_fit needs at least one covariate column");
    }
    if (p.start_index != X.start_index() || p.size() != X.n_rows()) {
        throw data_error("alignment", "price spans [" + std::to_string(p.start_index) + ", " +
                                          std::to_string(p.end_index()) +
                                          "] but covariates start at " +
                                          std::to_string(X.start_index()) + " with " +
                                          std::to_string(X.n_rows()) + " rows");
    }

    const std::size_t T = p.size();
    const std::size_t m = X.n_cols();
    const std::size_t n_params = 1 + m + m * (2 * q + 1);
    // Trimmed rows t = q+1 .. T-1-q need both dX_{t-q} (so t-q >= 1) and dX_{t+q}.
    if (T < 2 * q + 2 || T - 2 * q - 1 <= n_params) {
        throw data_error("insufficient_sample",
                         std::to_string(T) + " rows cannot support " + std::to_string(n_params) +
                             " coefficients with " + std::to_string(q) + " leads/lags");
    }

    DolsDesign d;
    d.trim_start = q + 1;
    d.n = T - 2 * q - 1;
    d.m = m;
    d.y.resize(static_cast<Eigen::Index>(d.n));
    d.X.resize(static_cast<Eigen::Index>(d.n), static_cast<Eigen::Index>(n_params));

    d.names.reserve(n_params);
    d.names.emplace_back("intercept");
    for (std::size_t k = 0; k < m; ++k) d.names.push_back(X.name_at(k));
    for (long j = -static_cast<long>(q); j <= static_cast<long>(q); ++j) {
        for (std::size_t k = 0; k < m; ++k) {
            std::string nm = "d_" + X.name_at(k);
            if (j < 0) nm += "_lead" + std::to_string(-j);
            if (j > 0) nm += "_lag" + std::to_string(j);
            d.names.push_back(nm);
        }
    }

    for (std::size_t i = 0; i < d.n; ++i) {
        const std::size_t t = d.trim_start + i;
        const auto row = static_cast<Eigen::Index>(i);
        d.y(row) = p.values[t];
        d.X(row, 0) = 1.0;
        for (std::size_t k = 0; k < m; ++k) {
            d.X(row, static_cast<Eigen::Index>(1 + k)) = X.column_at(k)[t];
        }
        Eigen::Index col = static_cast<Eigen::Index>(1 + m);
        for (long j = -static_cast<long>(q); j <= static_cast<long>(q); ++j) {
            const auto s = static_cast<std::size_t>(static_cast<long>(t) - j);
            for (std::size_t k = 0; k < m; ++k) {
                const auto& xk = X.column_at(k);
                d.X(row, col++) = xk[s] - xk[s - 1];
            }
        }
    }
    return d;
}

}  // namespace detail

namespace {

/// Two-sided p-value of a standard-normal statistic.
double normal_p_two_sided(double t) { return std::erfc(std::abs(t) / std::sqrt(2.0)); }

}  // namespace

CointFit dols_fit(const TimeSeries& p, const Frame& X, std::size_t q_leads_lags,
                  std::size_t nw_bandwidth) {
    const detail::DolsDesign d = detail::build_dols_design(p, X, q_leads_lags);
    if (nw_bandwidth >= d.n) {
        throw data_error("insufficient_sample",
                         "HAC bandwidth " + std::to_string(nw_bandwidth) + " needs more than " +
                             std::to_string(d.n) + " regression rows");
    }

    const regress::OlsFit fit = regress::ols(d.y, d.X, d.names);
    const Eigen::VectorXd hac = regress::newey_west_se(fit, d.X, nw_bandwidth);

    CointFit out;
    const std::size_t n_report = 1 + d.m;  // intercept + levels
    out.names.assign(d.names.begin(), d.names.begin() + static_cast<long>(n_report));
    out.coefficients.resize(n_report);
    out.hac_se.resize(n_report);
    out.t_stats.resize(n_report);
    out.p_values.resize(n_report);
    for (std::size_t k = 0; k < n_report; ++k) {
        const auto idx = static_cast<Eigen::Index>(k);
        out.coefficients[k] = fit.coefficients(idx);
        out.hac_se[k] = hac(idx);
        out.t_stats[k] = fit.coefficients(idx) / hac(idx);
        out.p_values[k] = normal_p_two_sided(out.t_stats[k]);
    }

    const auto n = static_cast<double>(d.n);
    const auto n_params = static_cast<double>(d.names.size());
    out.r_squared = fit.r_squared;
    out.adj_r_squared = 1.0 - (1.0 - fit.r_squared) * (n - 1.0) / (n - n_params);

    // Level residuals over the untrimmed span: only the intercept and level
    // part of the fit is subtracted, because the counterfactual price is the
    // fitted level path.
    std::vector<double> gap(p.size());
    for (std::size_t t = 0; t < p.size(); ++t) {
        double fitted = fit.coefficients(0);
        for (std::size_t k = 0; k < d.m; ++k) {
            fitted += fit.coefficients(static_cast<Eigen::Index>(1 + k)) * X.column_at(k)[t];
        }
        gap[t] = p.values[t] - fitted;
    }
    out.residuals = TimeSeries(p.start_index, std::move(gap), p.label + "_gap");

    std::vector<double> reg_resid(d.n);
    for (std::size_t i = 0; i < d.n; ++i) {
        reg_resid[i] = fit.residuals(static_cast<Eigen::Index>(i));
    }
    out.regression_residuals = TimeSeries(p.start_index + static_cast<long>(d.trim_start),
                                          std::move(reg_resid), "dols_residual");

    out.q_leads_lags = q_leads_lags;
    out.nw_bandwidth = nw_bandwidth;
    out.nobs = d.n;
    return out;
}

CointFit first_difference_fit(const TimeSeries& p, const Frame& X) {
    p.require_valid(2);
    X.require_valid();
    if (X.n_cols() == 0) {
        throw usage_error("invalid_config",
                          "first_difference_fit needs at least one covariate column");
    }
    if (p.start_index != X.start_index() || p.size() != X.n_rows()) {
        throw data_error("alignment", "price and covariates must share start index and length");
    }
    const std::size_t T = p.size();
    const std::size_t m = X.n_cols();
    const std::size_t n = T - 1;
    if (n <= m) {
        throw data_error("insufficient_sample", "need more than " + std::to_string(m + 1) +
                                                    " rows for " + std::to_string(m) +
                                                    " difference coefficients");
    }

    Eigen::VectorXd dy(static_cast<Eigen::Index>(n));
    Eigen::MatrixXd dX(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t t = i + 1;
        dy(static_cast<Eigen::Index>(i)) = p.values[t] - p.values[t - 1];
        for (std::size_t k = 0; k < m; ++k) {
            const auto& xk = X.column_at(k);
            dX(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = xk[t] - xk[t - 1];
        }
    }

    const regress::OlsFit fit = regress::ols(dy, dX, X.names());

    CointFit out;
    out.names = X.names();
    out.coefficients.resize(m);
    out.hac_se.resize(m);
    out.t_stats.resize(m);
    out.p_values.resize(m);
    for (std::size_t k = 0; k < m; ++k) {
        const auto idx = static_cast<Eigen::Index>(k);
        out.coefficients[k] = fit.coefficients(idx);
        out.hac_se[k] = fit.stderr_classical(idx);
        out.t_stats[k] = fit.coefficients(idx) / fit.stderr_classical(idx);
        out.p_values[k] = normal_p_two_sided(out.t_stats[k]);
    }
    out.r_squared = fit.r_squared;
    out.adj_r_squared =
        1.0 - (1.0 - fit.r_squared) * (static_cast<double>(n) - 1.0) /
                  (static_cast<double>(n) - static_cast<double>(m));

    std::vector<double> resid(n);
    for (std::size_t i = 0; i < n; ++i) resid[i] = fit.residuals(static_cast<Eigen::Index>(i));
    out.residuals = TimeSeries(p.start_index + 1, resid, "d" + p.label + "_residual");
    out.regression_residuals = out.residuals;
    out.q_leads_lags = 0;
    out.nw_bandwidth = 0;
    out.nobs = n;
    return out;
}

TimeSeries first_difference_counterfactual(const CointFit& fit, const TimeSeries& p,
                                           const Frame& X, long anchor_time) {
    if (fit.names != X.names()) {
        throw usage_error("invalid_config",
                          "fit coefficients do not match the covariate columns by name");
    }
    if (p.start_index != X.start_index() || p.size() != X.n_rows()) {
        throw data_error("alignment", "price and covariates must share start index and length");
    }
    if (anchor_time < p.start_index || anchor_time > p.end_index()) {
        throw usage_error("invalid_config", "anchor time " + std::to_string(anchor_time) +
                                                " outside [" + std::to_string(p.start_index) +
                                                ", " + std::to_string(p.end_index()) + "]");
    }

    const auto anchor = static_cast<std::size_t>(anchor_time - p.start_index);
    std::vector<double> f_hat(p.size() - anchor);
    f_hat[0] = p.values[anchor];
    for (std::size_t t = anchor + 1; t < p.size(); ++t) {
        double step = 0.0;
        for (std::size_t k = 0; k < X.n_cols(); ++k) {
            const auto& xk = X.column_at(k);
            step += fit.coefficients[k] * (xk[t] - xk[t - 1]);
        }
        f_hat[t - anchor] = f_hat[t - anchor - 1] + step;
    }
    return TimeSeries(anchor_time, std::move(f_hat), "f_hat");
}

csv::Table fit_table(const CointFit& fit) {
    csv::Table table;
    table.header = {"variable", "coef", "se", "t", "p"};
    for (std::size_t k = 0; k < fit.names.size(); ++k) {
        table.rows.push_back({fit.names[k], csv::format_double(fit.coefficients[k]),
                              csv::format_double(fit.hac_se[k]),
                              csv::format_double(fit.t_stats[k]),
                              csv::format_double(fit.p_values[k])});
    }
    return table;
}

void write_fit_csv(const std::string& path, const CointFit& fit) {
    csv::write_table(path, fit_table(fit));
}

}  // namespace bubblelab::coint
