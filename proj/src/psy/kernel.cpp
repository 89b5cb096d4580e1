#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "bubblelab/errors.hpp"
#include "bubblelab/psy/psy.hpp"
#include "bubblelab/regress/adf.hpp"

namespace bubblelab::psy {

namespace {

constexpr std::size_t kMaxLag = 6;
constexpr std::size_t kMaxP = kMaxLag + 2;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Running cross-moments of the window regression
///   Dy_t = a + b*(y_{t-1} - anchor) + sum_k g_k Dy_{t-k} + u_t
/// for a fixed window end. Extending the window start by one observation adds
/// exactly one regression row, so a full backward sweep costs one rank-1
/// update per window. The anchor shift (subtracting y[r2] from the levels)
/// keeps the Gram matrix well scaled and changes only the intercept, never
/// the t-statistic on the level.
class RunningWindow {
public:
    explicit RunningWindow(std::size_t p) : p_(p) {}

    void add_row(const double* u, double z) {
        for (std::size_t i = 0; i < p_; ++i) {
            for (std::size_t j = 0; j <= i; ++j) gram_[i][j] += u[i] * u[j];
            rhs_[i] += u[i] * z;
        }
        szz_ += z * z;
        ++n_;
    }

    /// t-statistic on the level coefficient, or NaN when the window has no
    /// residual degree of freedom, a singular Gram matrix, or a perfect fit
    /// (a statistic is never silently +-infinity).
    [[nodiscard]] double t_stat() const {
        if (n_ < p_ + 1) return kNaN;

        // Lower Cholesky with a relative pivot guard at 1e-13.
        double L[kMaxP][kMaxP];
        for (std::size_t i = 0; i < p_; ++i) {
            for (std::size_t j = 0; j <= i; ++j) {
                double sum = gram_[i][j];
                for (std::size_t k = 0; k < j; ++k) sum -= L[i][k] * L[j][k];
                if (i == j) {
                    if (!(sum > 1e-13 * std::max(gram_[i][i], 1e-300))) return kNaN;
                    L[i][i] = std::sqrt(sum);
                } else {
                    L[i][j] = sum / L[j][j];
                }
            }
        }

        const auto solve = [&](const double* b, double* x) {
            double w[kMaxP];
            for (std::size_t i = 0; i < p_; ++i) {
                double s = b[i];
                for (std::size_t k = 0; k < i; ++k) s -= L[i][k] * w[k];
                w[i] = s / L[i][i];
            }
            for (std::size_t ii = p_; ii-- > 0;) {
                double s = w[ii];
                for (std::size_t k = ii + 1; k < p_; ++k) s -= L[k][ii] * x[k];
                x[ii] = s / L[ii][ii];
            }
        };

        double beta[kMaxP];
        solve(rhs_, beta);
        double rss = szz_;
        for (std::size_t k = 0; k < p_; ++k) rss -= beta[k] * rhs_[k];
        const double s2 = std::max(rss, 0.0) / static_cast<double>(n_ - p_);
        if (!(s2 > 0.0)) return kNaN;

        double e1[kMaxP] = {};
        e1[1] = 1.0;
        double inv_col[kMaxP];
        solve(e1, inv_col);  // column 1 of the Gram inverse
        const double var = s2 * inv_col[1];
        if (!(var > 0.0)) return kNaN;

        const double t = beta[1] / std::sqrt(var);
        return std::isfinite(t) ? t : kNaN;
    }

private:
    std::size_t p_;
    std::size_t n_ = 0;
    double gram_[kMaxP][kMaxP] = {};
    double rhs_[kMaxP] = {};
    double szz_ = 0.0;
};

/// BSADF at a fixed window end by backward enumeration; NaN if every window
/// failed.
double bsadf_at(const std::vector<double>& v, std::size_t r2, std::size_t minw, std::size_t K) {
    const std::size_t p = K + 2;
    RunningWindow acc(p);
    const double anchor = v[r2];
    const std::size_t r1_max = r2 + 1 - minw;

    double u[kMaxP];
    const auto add_observation = [&](std::size_t t) {
        u[0] = 1.0;
        u[1] = v[t - 1] - anchor;
        for (std::size_t k = 1; k <= K; ++k) u[1 + k] = v[t - k] - v[t - k - 1];
        acc.add_row(u, v[t] - v[t - 1]);
    };

    for (std::size_t t = r2; t >= r1_max + K + 1; --t) add_observation(t);

    double best = kNaN;
    for (std::size_t r1 = r1_max;; --r1) {
        const double t = acc.t_stat();
        if (!std::isnan(t) && (std::isnan(best) || t > best)) best = t;
        if (r1 == 0) break;
        add_observation(r1 + K);  // earliest row of the window starting at r1-1
    }
    return best;
}

/// Same quantity by refitting every window through the QR path.
double bsadf_at_naive(const TimeSeries& y, std::size_t r2, std::size_t minw, std::size_t K) {
    double best = kNaN;
    for (std::size_t r1 = 0; r1 + minw <= r2 + 1; ++r1) {
        try {
            const double t = regress::adf_t_stat(y, r1, r2, K).t_stat;
            if (std::isnan(best) || t > best) best = t;
        } catch (const EngineError&) {
            // singular or degenerate window: excluded from the sup
        }
    }
    return best;
}

std::size_t checked_min_window(const TimeSeries& y, const PsyConfig& cfg) {
    y.require_valid(4);
    return cfg.min_window_obs(y.size());
}

}  // namespace

std::size_t PsyConfig::min_window_obs(std::size_t T) const {
    if (!(r0_fraction >= 0.01) || !(r0_fraction < 1.0)) {
        throw usage_error("invalid_config",
                          "r0_fraction must lie in [0.01, 1); got " + std::to_string(r0_fraction));
    }
    if (lag_K > kMaxLag) {
        throw usage_error("invalid_config",
                          "lag_K at most " + std::to_string(kMaxLag) + "; got " + std::to_string(lag_K));
    }
    const double raw = r0_fraction * static_cast<double>(T);
    const double fl = std::floor(raw);
    // ceil, tolerant of products like 0.1*300 landing epsilon above an integer
    std::size_t minw = static_cast<std::size_t>(raw - fl < 1e-9 ? fl : fl + 1.0);
    if (minw < lag_K + 4) {
        throw usage_error("invalid_config",
                          "minimum window " + std::to_string(minw) + " below lag_K + 4 = " +
                              std::to_string(lag_K + 4));
    }
    if (minw > T) {
        throw usage_error("invalid_config", "minimum window exceeds the sample length");
    }
    return minw;
}

double default_r0(std::size_t T) {
    if (T < 30) {
        throw data_error("sample_too_short",
                         "need T >= 30 for the recursive test; got " + std::to_string(T));
    }
    return std::min(0.01 + 1.8 / std::sqrt(static_cast<double>(T)), 0.9);
}

double bsadf(const TimeSeries& y, std::size_t r2, const PsyConfig& cfg, Engine engine) {
    const std::size_t minw = checked_min_window(y, cfg);
    if (r2 >= y.size()) {
        throw data_error("index_out_of_range", "r2 = " + std::to_string(r2) +
                                                   " outside series of length " +
                                                   std::to_string(y.size()));
    }
    if (r2 + 1 < minw) {
        throw data_error("window_too_short", "r2 = " + std::to_string(r2) +
                                                 " admits no window of length >= " +
                                                 std::to_string(minw));
    }
    const double t = engine == Engine::Incremental ? bsadf_at(y.values, r2, minw, cfg.lag_K)
                                                   : bsadf_at_naive(y, r2, minw, cfg.lag_K);
    if (std::isnan(t)) {
        throw numeric_error("window_degenerate",
                            "every admissible window ending at r2 = " + std::to_string(r2) +
                                " is singular or degenerate");
    }
    return t;
}

ExplosiveTestResult gsadf(const TimeSeries& y, const PsyConfig& cfg, Engine engine) {
    const std::size_t minw = checked_min_window(y, cfg);
    const std::size_t T = y.size();

    ExplosiveTestResult out;
    out.first_r2 = minw - 1;
    out.bsadf_sequence.reserve(T - minw + 1);

    double best = kNaN;
    for (std::size_t r2 = minw - 1; r2 < T; ++r2) {
        const double t = engine == Engine::Incremental ? bsadf_at(y.values, r2, minw, cfg.lag_K)
                                                       : bsadf_at_naive(y, r2, minw, cfg.lag_K);
        out.bsadf_sequence.push_back(t);
        if (!std::isnan(t) && (std::isnan(best) || t > best)) best = t;
    }
    if (std::isnan(best)) {
        throw numeric_error("window_degenerate",
                            "every window of the recursive sweep is singular or degenerate");
    }
    out.gsadf = best;
    return out;
}

}  // namespace bubblelab::psy
