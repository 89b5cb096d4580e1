#pragma once

/// Hump-shaped technology-shock profiles and their discounted present-value
/// transforms. A profile places a bounded, compactly supported contribution
/// delta_t on dividend growth over an adoption window [T1, T2]; everything in
/// this header is a pure function of the profile parameters.

#include <cstddef>
#include <vector>

#include "bubblelab/core/time_series.hpp"

namespace bubblelab::dgp {

/// Functional form of the shock profile on its support window.
enum class ShockShape {
    Triangular,  ///< piecewise-linear ramp up to the peak, then down to zero
    Gaussian,    ///< bell curve centred on the peak date, truncated to the window
    Beta,        ///< Beta(a, b) density rescaled to the window
    GammaLike,   ///< s * exp(-(s/tau)^2 / 2) in window time s = t - T1
};

/// A deterministic hump-shaped shock profile with compact support [T1, T2].
///
/// delta_t is zero off the support, lies in [0, delta_max] everywhere, and
/// attains delta_max at its peak (the unnormalized Beta and GammaLike forms
/// are divided by their maximum over the integer support grid so the peak is
/// exact). The peak lag tau must lie strictly inside (0, T2 - T1).
struct TechShockProfile {
    ShockShape shape = ShockShape::Triangular;
    double delta_max = 0.0;   ///< peak contribution to dividend growth
    long T1 = 0;              ///< adoption date (first support point)
    long T2 = 0;              ///< maturation date (last support point), > T1
    long tau = 0;             ///< peak lag, in (0, T2 - T1)
    double gaussian_sigma = 0.0;  ///< Gaussian width; 0 selects (T2 - T1) / 4
    double beta_a = 2.0;      ///< Beta shape a (>= 1 so the density is bounded)
    double beta_b = 5.0;      ///< Beta shape b (>= 1)

    /// Throws usage_error("invalid_config") when any parameter is out of range.
    void require_valid() const;
};

/// Evaluates the profile at an integer date. Returns 0 off the support; never
/// throws once the profile itself is valid.
[[nodiscard]] double delta_at(const TechShockProfile& profile, long t);

/// Evaluates the profile on t = 0, ..., length - 1 with the normalization
/// constant computed once. Identical values to delta_at pointwise.
[[nodiscard]] std::vector<double> delta_path(const TechShockProfile& profile, std::size_t length);

/// Sentinel horizon requesting the exact present value (summation until the
/// profile's support is exhausted).
inline constexpr std::size_t kExactHorizon = static_cast<std::size_t>(-1);

/// Discounted present value of future shocks,
///     T_t = sum_{j=0}^{horizon} rho^j * delta_{t+1+j}.
///
/// With the default horizon the sum runs until the support is exhausted, which
/// is exact because delta vanishes beyond T2. A finite horizon truncates the
/// sum; the caller is responsible for choosing it large enough that either
/// rho^horizon * delta_max is negligible or the support is exhausted.
[[nodiscard]] double pv_term(const TechShockProfile& profile, double rho, long t,
                             std::size_t horizon = kExactHorizon);

/// Second difference of the present-value term,
///     Delta^2 T_t = T_t - 2 T_{t-1} + T_{t-2},
/// the convexity diagnostic for the discounted shock path.
[[nodiscard]] double second_difference_pv(const TechShockProfile& profile, double rho, long t);

/// Market-level shock path when firm i loads on the common profile with
/// multiplier lambda_i and market weight w_i:
///     delta_mkt_t = (sum_i w_i * lambda_i) * delta_t.
///
/// Weights must be non-negative and sum to one (within 1e-9); violations throw
/// data_error("weight_normalization"). A size mismatch between lambdas and
/// weights throws usage_error("invalid_config").
[[nodiscard]] TimeSeries aggregate_heterogeneous(const std::vector<double>& lambdas,
                                                 const std::vector<double>& weights,
                                                 const TechShockProfile& profile,
                                                 std::size_t length);

}  // namespace bubblelab::dgp
