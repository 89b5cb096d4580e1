#include "bubblelab/dgp/profile.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/beta.hpp>

#include "bubblelab/errors.hpp"

namespace bubblelab::dgp {

namespace {

/// Shape value before peak normalization, as a function of the date.
double unnormalized_at(const TechShockProfile& p, long t) {
    if (t < p.T1 || t > p.T2) return 0.0;
    const double width = static_cast<double>(p.T2 - p.T1);
    switch (p.shape) {
        case ShockShape::Triangular: {
            const double up = static_cast<double>(t - p.T1) / static_cast<double>(p.tau);
            const double down = static_cast<double>(p.T2 - t) / (width - static_cast<double>(p.tau));
            return t <= p.T1 + p.tau ? up : down;
        }
        case ShockShape::Gaussian: {
            const double sigma = p.gaussian_sigma > 0.0 ? p.gaussian_sigma : width / 4.0;
            const double z = (static_cast<double>(t) - static_cast<double>(p.T1 + p.tau)) / sigma;
            return std::exp(-0.5 * z * z);
        }
        case ShockShape::Beta: {
            const boost::math::beta_distribution<double> dist(p.beta_a, p.beta_b);
            const double x = static_cast<double>(t - p.T1) / width;
            return boost::math::pdf(dist, x);
        }
        case ShockShape::GammaLike: {
            const double s = static_cast<double>(t - p.T1);
            const double z = s / static_cast<double>(p.tau);
            return s * std::exp(-0.5 * z * z);
        }
    }
    return 0.0;
}

/// Maximum of the unnormalized shape over the integer support grid. The
/// triangular and Gaussian forms peak at t = T1 + tau with value 1 by
/// construction; the Beta and GammaLike forms are rescaled by this maximum so
/// the realized peak equals delta_max exactly on the grid.
double normalization(const TechShockProfile& p) {
    if (p.shape == ShockShape::Triangular || p.shape == ShockShape::Gaussian) return 1.0;
    double best = 0.0;
    for (long t = p.T1; t <= p.T2; ++t) best = std::max(best, unnormalized_at(p, t));
    return best;
}

}  // namespace

void TechShockProfile::require_valid() const {
    if (!(delta_max >= 0.0) || !std::isfinite(delta_max)) {
        throw usage_error("invalid_config", "delta_max must be a finite non-negative number");
    }
    if (T2 <= T1) throw usage_error("invalid_config", "maturation date T2 must exceed adoption date T1");
    if (tau <= 0 || tau >= T2 - T1) {
        throw usage_error("invalid_config", "peak lag tau must lie strictly inside (0, T2 - T1)");
    }
    if (gaussian_sigma < 0.0 || !std::isfinite(gaussian_sigma)) {
        throw usage_error("invalid_config", "gaussian_sigma must be non-negative (0 selects the default width)");
    }
    if (shape == ShockShape::Beta && (beta_a < 1.0 || beta_b < 1.0)) {
        throw usage_error("invalid_config", "Beta shape parameters must be >= 1 so the density is bounded");
    }
}

double delta_at(const TechShockProfile& profile, long t) {
    profile.require_valid();
    if (t < profile.T1 || t > profile.T2) return 0.0;
    return profile.delta_max * unnormalized_at(profile, t) / normalization(profile);
}

std::vector<double> delta_path(const TechShockProfile& profile, std::size_t length) {
    profile.require_valid();
    const double norm = normalization(profile);
    std::vector<double> out(length, 0.0);
    for (std::size_t t = 0; t < length; ++t) {
        const long date = static_cast<long>(t);
        if (date >= profile.T1 && date <= profile.T2) {
            out[t] = profile.delta_max * unnormalized_at(profile, date) / norm;
        }
    }
    return out;
}

double pv_term(const TechShockProfile& profile, double rho, long t, std::size_t horizon) {
    profile.require_valid();
    if (!(rho > 0.0) || !(rho < 1.0)) {
        throw usage_error("invalid_config", "discount factor rho must lie in (0, 1)");
    }
    if (t + 1 > profile.T2) return 0.0;
    // Number of terms until the support is exhausted: j ranges over
    // t + 1 + j <= T2, i.e. j <= T2 - t - 1.
    const std::size_t to_support = static_cast<std::size_t>(profile.T2 - t - 1);
    const std::size_t last_j = horizon == kExactHorizon ? to_support : std::min(horizon, to_support);
    const double norm = normalization(profile);
    double sum = 0.0;
    double weight = 1.0;
    for (std::size_t j = 0; j <= last_j; ++j) {
        const long date = t + 1 + static_cast<long>(j);
        if (date >= profile.T1 && date <= profile.T2) {
            sum += weight * profile.delta_max * unnormalized_at(profile, date) / norm;
        }
        weight *= rho;
    }
    return sum;
}

double second_difference_pv(const TechShockProfile& profile, double rho, long t) {
    return pv_term(profile, rho, t) - 2.0 * pv_term(profile, rho, t - 1) + pv_term(profile, rho, t - 2);
}

TimeSeries aggregate_heterogeneous(const std::vector<double>& lambdas,
                                   const std::vector<double>& weights,
                                   const TechShockProfile& profile, std::size_t length) {
    if (lambdas.size() != weights.size() || lambdas.empty()) {
        throw usage_error("invalid_config", "lambdas and weights must be non-empty and equally sized");
    }
    double weight_sum = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0)) throw data_error("weight_normalization", "market weights must be non-negative");
        weight_sum += w;
    }
    if (std::abs(weight_sum - 1.0) > 1e-9) {
        throw data_error("weight_normalization", "market weights must sum to one");
    }
    const double loading = std::inner_product(weights.begin(), weights.end(), lambdas.begin(), 0.0);
    std::vector<double> values = delta_path(profile, length);
    for (double& v : values) v *= loading;
    return TimeSeries(0, std::move(values), "delta_mkt");
}

}  // namespace bubblelab::dgp
