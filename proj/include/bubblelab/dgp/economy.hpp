#pragma once

/// Simulation of the technology-augmented present-value economy: log dividends
/// cumulate a drift plus the shock profile, the fundamental log price adds the
/// discounted present value of future shocks, and the observed log price may
/// carry a speculative component and observation noise. All levels are log
/// levels; nothing here exponentiates.

#include <cstddef>
#include <optional>

#include "bubblelab/core/rng.hpp"
#include "bubblelab/core/time_series.hpp"
#include "bubblelab/dgp/profile.hpp"

namespace bubblelab::dgp {

/// Log-linearization constant implied by a discount factor via the
/// Campbell-Shiller relation: with rho = 1 / (1 + exp(dbar - pbar)),
///     kappa = -log(rho) - (1 - rho) * log(1 / rho - 1).
[[nodiscard]] double kappa_from_rho(double rho);

/// Present-value pricing block: discounting, dividend drift, mean return, the
/// log-linearization constant, and an optional expected-return loading phi on
/// the technology shock (phi < 0 amplifies the shock's price impact by 1 - phi).
struct PresentValueModel {
    double rho = 0.95;    ///< discount factor, in (0, 1)
    double c = 0.02;      ///< steady-state log dividend growth
    double r_bar = 0.06;  ///< mean log return
    double kappa = 0.0;   ///< log-linearization constant
    double phi = 0.0;     ///< expected-return loading on the shock, < 1

    /// Model with kappa derived from rho via the Campbell-Shiller relation.
    [[nodiscard]] static PresentValueModel baseline(double rho = 0.95, double c = 0.02,
                                                    double r_bar = 0.06, double phi = 0.0);

    /// Constant level term C = kappa / (1 - rho) + (c - r_bar) / (1 - rho).
    [[nodiscard]] double level_constant() const;

    /// Throws usage_error("invalid_config") when a parameter is out of range.
    void require_valid() const;
};

/// A speculative component: zero before `start`, initialized at b_init on
/// `start`, explosive AR(1) with root rho_bubble on (start, end], and a
/// partial-collapse AR(1) with root collapse_factor after `end`. Both regimes
/// share the innovation standard deviation.
struct BubbleSpec {
    long start = 0;                ///< origination date t2
    long end = 0;                  ///< final explosive date t3, > start
    double b_init = 0.0;           ///< level at origination
    double rho_bubble = 1.035;     ///< explosive root, > 1
    double innovation_sd = 0.0;    ///< sd of the AR innovations, >= 0
    double collapse_factor = 0.5;  ///< post-collapse root, in (0, 1)

    void require_valid() const;
};

/// One simulated economy. All series share start index 0 and length T.
///
/// Pathwise identities (up to floating-point roundoff):
///   fundamental = dividends + C + (1 - phi) * pv_term          at every t,
///   pv_term_t   = rho^{-1} * pv_term_{t-1} - rho^{-1} * delta_t on the interior,
///   price       = fundamental + bubble + observation noise.
/// The drift series records the predictable part of the fundamental increment,
///   drift_t = c + delta_t + (1 - phi) * ((1/rho - 1) * pv_term_{t-1} - (1/rho) * delta_t),
/// with the time-0 entry set to the steady-state drift c (no predecessor).
struct SimulatedEconomy {
    TimeSeries delta;        ///< realized shock-profile path
    TimeSeries pv_term;      ///< discounted present value of future shocks
    TimeSeries dividends;    ///< log dividends, d_0 = 0
    TimeSeries fundamental;  ///< fundamental log price
    TimeSeries bubble;       ///< speculative component (zero when absent)
    TimeSeries price;        ///< observed log price
    TimeSeries drift;        ///< predictable fundamental increment
    double innovations_sd = 0.0;  ///< dividend innovation sd used
    double obs_noise_sd = 0.0;    ///< observation noise sd used

    /// Columns (delta, pv_term, d, f, b, p, drift) indexed from t = 0.
    [[nodiscard]] Frame to_frame() const;
};

/// Simulates T observations of the economy.
///
/// Draw order on the stream: dividend innovations for t = 1..T-1, then (when a
/// bubble is present) its innovations for t = start+1..T-1, then (when
/// obs_noise_sd > 0) observation noise for t = 0..T-1. Log dividends start at
/// d_0 = 0 and cumulate c + delta_t + eps_t.
[[nodiscard]] SimulatedEconomy simulate_economy(const TechShockProfile& profile,
                                                const PresentValueModel& model, std::size_t T,
                                                double sigma_eps,
                                                const std::optional<BubbleSpec>& bubble,
                                                double obs_noise_sd, RngStream& stream);

}  // namespace bubblelab::dgp
