#pragma once

/// Stochastic technology with Bayesian learning. The cumulative impact
/// delta_bar of the new technology is uncertain; agents observe noisy signals
/// delta_obs_t = delta_bar * g_star(t) + sigma_xi * xi_t and update a scalar
/// Kalman posterior. The filtered present-value term delta_hat_t * G_rho(t)
/// prices the technology into both a price-dividend ratio and a log price.

#include <cstddef>
#include <optional>
#include <vector>

#include "bubblelab/core/rng.hpp"
#include "bubblelab/core/time_series.hpp"
#include "bubblelab/dgp/economy.hpp"
#include "bubblelab/dgp/profile.hpp"

namespace bubblelab::dgp {

/// Prior and signal structure for the uncertain technology impact.
///
/// g_star is the normalized shock profile: g_star[t] >= 0 with
/// sum_t g_star[t] = 1 (within 1e-12), so that mu_delta * g_star reproduces a
/// deterministic profile whose discrete sum is mu_delta. Entries beyond the
/// stored vector are treated as zero.
struct StochasticTechSpec {
    double mu_delta = 0.0;     ///< prior mean of the cumulative impact
    double sigma_delta = 0.0;  ///< prior standard deviation, >= 0
    double sigma_xi = 0.0;     ///< signal noise standard deviation, > 0
    std::vector<double> g_star;  ///< normalized profile weights from t = 0

    /// Spec matching a deterministic profile: g_star[t] = delta_t / sum(delta)
    /// and mu_delta = sum(delta), so the prior mean reproduces the profile.
    /// coefficient_of_variation sets sigma_delta = cv * mu_delta.
    [[nodiscard]] static StochasticTechSpec from_profile(const TechShockProfile& profile,
                                                         double coefficient_of_variation,
                                                         double sigma_xi);

    void require_valid() const;
};

/// Scalar Kalman posterior over the cumulative impact.
struct KalmanState {
    double delta_hat = 0.0;  ///< posterior mean
    double P = 0.0;          ///< posterior variance, >= 0 and non-increasing
};

/// One filter update, with the diagnostics used by the economics.
struct KalmanStep {
    KalmanState next;
    double gain = 0.0;        ///< K_t = P g / (g^2 P + sigma_xi^2)
    double innovation = 0.0;  ///< nu_t = delta_obs - g * delta_hat
};

/// Advances the posterior on one observation delta_obs with signal loading g:
///     K  = P g / (g^2 P + sigma_xi^2),
///     nu = delta_obs - g * delta_hat,
///     delta_hat' = delta_hat + K nu,
///     P' = P - K g P  ( = P sigma_xi^2 / (g^2 P + sigma_xi^2) ).
[[nodiscard]] KalmanStep kalman_step(const KalmanState& state, double g, double sigma_xi,
                                     double delta_obs);

/// Discounted future signal weights G_rho(t) = sum_{j>=0} rho^j g_star(t+1+j)
/// for t = 0..length-1, computed by stable backward accumulation.
[[nodiscard]] std::vector<double> discounted_weight_path(const std::vector<double>& g_star,
                                                         double rho, std::size_t length);

/// Stationary AR(1) noise added to the price-dividend ratio.
struct Ar1NoiseSpec {
    double persistence = 0.95;    ///< AR root, in (-1, 1)
    double innovation_sd = 0.0;   ///< sd of the AR innovations, >= 0
};

/// Output of the learning economy. The embedded economy's series are:
/// delta = observed signals (zero at t = 0, no time-0 increment), pv_term =
/// filtered present value delta_hat_t * G_rho(t), dividends cumulate
/// c + delta_obs_t + eps_t, fundamental = dividends + C + (1-phi) * pv_term,
/// price = fundamental (no bubble, no observation noise), and drift records
/// the realized non-innovation increment f_t - f_{t-1} - eps_t.
struct StochasticSimulation {
    SimulatedEconomy economy;
    TimeSeries pd_ratio;                  ///< y_t = C + pv_term_t + u_t
    std::vector<KalmanState> filter_path; ///< posterior after the date-t update
    double delta_bar = 0.0;               ///< realized cumulative impact draw
};

/// Simulates T observations of the learning economy.
///
/// Draw order on the stream is fixed regardless of configuration so that
/// common-random-number designs stay aligned across parameter grids: first the
/// impact draw z (delta_bar = mu_delta + sigma_delta * z), then the initial
/// ratio-noise draw, then per period t = 1..T-1 the triple (dividend
/// innovation, signal noise, ratio-noise innovation). When pd_noise is absent
/// the ratio-noise draws are still consumed but contribute zero.
[[nodiscard]] StochasticSimulation simulate_stochastic_economy(
    const StochasticTechSpec& spec, const PresentValueModel& model, std::size_t T,
    double sigma_eps, const std::optional<Ar1NoiseSpec>& pd_noise, RngStream& stream);

}  // namespace bubblelab::dgp
