#include "bubblelab/dgp/stochastic.hpp"

#include <cmath>
#include <numeric>
#include <utility>

#include "bubblelab/errors.hpp"

namespace bubblelab::dgp {

StochasticTechSpec StochasticTechSpec::from_profile(const TechShockProfile& profile,
                                                    double coefficient_of_variation,
                                                    double sigma_xi) {
    if (!(coefficient_of_variation >= 0.0)) {
        throw usage_error("invalid_config", "coefficient of variation must be >= 0");
    }
    std::vector<double> path = delta_path(profile, static_cast<std::size_t>(profile.T2) + 1);
    const double total = std::accumulate(path.begin(), path.end(), 0.0);
    if (!(total > 0.0)) {
        throw usage_error("invalid_config", "profile must have positive mass to define signal weights");
    }
    for (double& g : path) g /= total;
    // Remove the residual rounding in the weight sum so the normalization
    // invariant holds exactly rather than to machine epsilon times the length.
    const double renorm = std::accumulate(path.begin(), path.end(), 0.0);
    for (double& g : path) g /= renorm;
    StochasticTechSpec spec;
    spec.mu_delta = total;
    spec.sigma_delta = coefficient_of_variation * total;
    spec.sigma_xi = sigma_xi;
    spec.g_star = std::move(path);
    return spec;
}

void StochasticTechSpec::require_valid() const {
    if (!(sigma_xi > 0.0)) throw usage_error("invalid_config", "signal noise sigma_xi must be > 0");
    if (!(sigma_delta >= 0.0)) throw usage_error("invalid_config", "prior sd must be >= 0");
    if (g_star.empty()) throw usage_error("invalid_config", "signal weights must be non-empty");
    double sum = 0.0;
    for (double g : g_star) {
        if (!(g >= 0.0) || !std::isfinite(g)) {
            throw usage_error("invalid_config", "signal weights must be finite and non-negative");
        }
        sum += g;
    }
    if (std::abs(sum - 1.0) > 1e-12) {
        throw usage_error("invalid_config", "signal weights must sum to one");
    }
}

KalmanStep kalman_step(const KalmanState& state, double g, double sigma_xi, double delta_obs) {
    const double variance = g * g * state.P + sigma_xi * sigma_xi;
    const double gain = state.P * g / variance;
    const double innovation = delta_obs - g * state.delta_hat;
    KalmanStep step;
    step.gain = gain;
    step.innovation = innovation;
    step.next.delta_hat = state.delta_hat + gain * innovation;
    step.next.P = state.P - gain * g * state.P;
    return step;
}

std::vector<double> discounted_weight_path(const std::vector<double>& g_star, double rho,
                                           std::size_t length) {
    if (!(rho > 0.0) || !(rho < 1.0)) {
        throw usage_error("invalid_config", "discount factor rho must lie in (0, 1)");
    }
    // Work over the longer of the requested span and the weight support, then
    // truncate: G(t) depends on weights beyond t only.
    const std::size_t horizon = std::max(length, g_star.size());
    std::vector<double> G(horizon, 0.0);
    auto weight_at = [&](std::size_t t) { return t < g_star.size() ? g_star[t] : 0.0; };
    for (std::size_t t = horizon - 1; t-- > 0;) {
        G[t] = weight_at(t + 1) + rho * G[t + 1];
    }
    G.resize(length);
    return G;
}

StochasticSimulation simulate_stochastic_economy(const StochasticTechSpec& spec,
                                                 const PresentValueModel& model, std::size_t T,
                                                 double sigma_eps,
                                                 const std::optional<Ar1NoiseSpec>& pd_noise,
                                                 RngStream& stream) {
    spec.require_valid();
    model.require_valid();
    if (T < 2) throw usage_error("invalid_config", "sample length must be at least 2");
    if (!(sigma_eps >= 0.0)) throw usage_error("invalid_config", "innovation sd must be >= 0");
    if (pd_noise) {
        if (!(std::abs(pd_noise->persistence) < 1.0)) {
            throw usage_error("invalid_config", "ratio-noise persistence must lie in (-1, 1)");
        }
        if (!(pd_noise->innovation_sd >= 0.0)) {
            throw usage_error("invalid_config", "ratio-noise innovation sd must be >= 0");
        }
    }

    const std::vector<double> G = discounted_weight_path(spec.g_star, model.rho, T);
    auto weight_at = [&](std::size_t t) { return t < spec.g_star.size() ? spec.g_star[t] : 0.0; };

    // Fixed draw order: impact draw, initial ratio noise, then one
    // (epsilon, xi, ratio-innovation) triple per period.
    const double impact_z = stream.normal();
    const double delta_bar = spec.mu_delta + spec.sigma_delta * impact_z;
    const double u0_z = stream.normal();

    const double level = model.level_constant();
    const double gearing = 1.0 - model.phi;

    std::vector<KalmanState> filter(T);
    filter[0] = KalmanState{spec.mu_delta, spec.sigma_delta * spec.sigma_delta};

    std::vector<double> delta_obs(T, 0.0), pv(T, 0.0), d(T, 0.0), f(T, 0.0), y(T, 0.0), drift(T, 0.0);
    // The ratio noise starts from its stationary distribution.
    double u = 0.0;
    if (pd_noise) {
        const double stationary_sd =
            pd_noise->innovation_sd / std::sqrt(1.0 - pd_noise->persistence * pd_noise->persistence);
        u = stationary_sd * u0_z;
    }

    pv[0] = filter[0].delta_hat * G[0];
    f[0] = level + gearing * pv[0];
    y[0] = level + pv[0] + u;
    drift[0] = model.c;

    for (std::size_t t = 1; t < T; ++t) {
        const double eps = sigma_eps * stream.normal();
        const double xi = stream.normal();
        const double u_z = stream.normal();

        delta_obs[t] = delta_bar * weight_at(t) + spec.sigma_xi * xi;
        const KalmanStep step = kalman_step(filter[t - 1], weight_at(t), spec.sigma_xi, delta_obs[t]);
        filter[t] = step.next;

        d[t] = d[t - 1] + model.c + delta_obs[t] + eps;
        pv[t] = filter[t].delta_hat * G[t];
        f[t] = d[t] + level + gearing * pv[t];
        drift[t] = f[t] - f[t - 1] - eps;

        if (pd_noise) u = pd_noise->persistence * u + pd_noise->innovation_sd * u_z;
        y[t] = level + pv[t] + u;
    }

    SimulatedEconomy economy{
        TimeSeries(0, std::move(delta_obs), "delta"),
        TimeSeries(0, std::move(pv), "pv_term"),
        TimeSeries(0, std::move(d), "d"),
        TimeSeries(0, f, "f"),
        TimeSeries(0, std::vector<double>(T, 0.0), "b"),
        TimeSeries(0, std::move(f), "p"),
        TimeSeries(0, std::move(drift), "drift"),
        sigma_eps,
        0.0,
    };
    StochasticSimulation out{std::move(economy), TimeSeries(0, std::move(y), "pd_ratio"),
                             std::move(filter), delta_bar};
    return out;
}

}  // namespace bubblelab::dgp
