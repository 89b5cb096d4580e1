#include "bubblelab/dgp/economy.hpp"

#include <cmath>
#include <utility>
#include <vector>

#include "bubblelab/errors.hpp"

namespace bubblelab::dgp {

double kappa_from_rho(double rho) {
    if (!(rho > 0.0) || !(rho < 1.0)) {
        throw usage_error("invalid_config", "discount factor rho must lie in (0, 1)");
    }
    return -std::log(rho) - (1.0 - rho) * std::log(1.0 / rho - 1.0);
}

PresentValueModel PresentValueModel::baseline(double rho, double c, double r_bar, double phi) {
    PresentValueModel m;
    m.rho = rho;
    m.c = c;
    m.r_bar = r_bar;
    m.kappa = kappa_from_rho(rho);
    m.phi = phi;
    return m;
}

double PresentValueModel::level_constant() const {
    return (kappa + c - r_bar) / (1.0 - rho);
}

void PresentValueModel::require_valid() const {
    if (!(rho > 0.0) || !(rho < 1.0)) {
        throw usage_error("invalid_config", "discount factor rho must lie in (0, 1)");
    }
    if (!(phi < 1.0)) {
        throw usage_error("invalid_config", "expected-return loading phi must be < 1");
    }
    if (!std::isfinite(c) || !std::isfinite(r_bar) || !std::isfinite(kappa)) {
        throw usage_error("invalid_config", "model parameters must be finite");
    }
}

void BubbleSpec::require_valid() const {
    if (end <= start) throw usage_error("invalid_config", "bubble end date must exceed its start date");
    if (!(rho_bubble > 1.0)) throw usage_error("invalid_config", "bubble root must exceed 1");
    if (!(collapse_factor > 0.0) || !(collapse_factor < 1.0)) {
        throw usage_error("invalid_config", "collapse factor must lie in (0, 1)");
    }
    if (!(innovation_sd >= 0.0)) throw usage_error("invalid_config", "bubble innovation sd must be >= 0");
}

Frame SimulatedEconomy::to_frame() const {
    Frame frame;
    frame.set_start_index(delta.start_index);
    frame.add_column("delta", delta.values);
    frame.add_column("pv_term", pv_term.values);
    frame.add_column("d", dividends.values);
    frame.add_column("f", fundamental.values);
    frame.add_column("b", bubble.values);
    frame.add_column("p", price.values);
    frame.add_column("drift", drift.values);
    return frame;
}

SimulatedEconomy simulate_economy(const TechShockProfile& profile, const PresentValueModel& model,
                                  std::size_t T, double sigma_eps,
                                  const std::optional<BubbleSpec>& bubble, double obs_noise_sd,
                                  RngStream& stream) {
    profile.require_valid();
    model.require_valid();
    if (bubble) bubble->require_valid();
    if (T < 2) throw usage_error("invalid_config", "sample length must be at least 2");
    if (!(sigma_eps >= 0.0) || !(obs_noise_sd >= 0.0)) {
        throw usage_error("invalid_config", "innovation standard deviations must be >= 0");
    }

    // The present-value term at date t needs the shock path through T2, so the
    // working horizon extends to the later of the sample end and the support end.
    const std::size_t horizon = std::max(T, static_cast<std::size_t>(std::max<long>(profile.T2 + 1, 1)));
    const std::vector<double> delta = delta_path(profile, horizon);

    // Backward accumulation T_t = delta_{t+1} + rho * T_{t+1} is exact (the tail
    // beyond the support is zero) and numerically stable, unlike the forward
    // recursion whose factor 1/rho amplifies roundoff.
    std::vector<double> pv(horizon, 0.0);
    for (std::size_t t = horizon - 1; t-- > 0;) {
        pv[t] = delta[t + 1] + model.rho * pv[t + 1];
    }

    std::vector<double> eps(T, 0.0);
    for (std::size_t t = 1; t < T; ++t) eps[t] = sigma_eps * stream.normal();

    std::vector<double> bubble_path(T, 0.0);
    if (bubble) {
        const long start = bubble->start;
        for (std::size_t t = 0; t < T; ++t) {
            const long date = static_cast<long>(t);
            if (date < start) continue;
            if (date == start) {
                bubble_path[t] = bubble->b_init;
            } else {
                const double root = date <= bubble->end ? bubble->rho_bubble : bubble->collapse_factor;
                bubble_path[t] = root * bubble_path[t - 1] + bubble->innovation_sd * stream.normal();
            }
        }
    }

    const double level = model.level_constant();
    const double gearing = 1.0 - model.phi;
    std::vector<double> d(T, 0.0), f(T, 0.0), p(T, 0.0), drift(T, 0.0);
    for (std::size_t t = 1; t < T; ++t) d[t] = d[t - 1] + model.c + delta[t] + eps[t];
    for (std::size_t t = 0; t < T; ++t) f[t] = d[t] + level + gearing * pv[t];

    drift[0] = model.c;
    const double inv_rho = 1.0 / model.rho;
    for (std::size_t t = 1; t < T; ++t) {
        drift[t] = model.c + delta[t] + gearing * ((inv_rho - 1.0) * pv[t - 1] - inv_rho * delta[t]);
    }

    for (std::size_t t = 0; t < T; ++t) {
        const double noise = obs_noise_sd > 0.0 ? obs_noise_sd * stream.normal() : 0.0;
        p[t] = f[t] + bubble_path[t] + noise;
    }

    SimulatedEconomy economy{
        TimeSeries(0, std::vector<double>(delta.begin(), delta.begin() + static_cast<long>(T)), "delta"),
        TimeSeries(0, std::vector<double>(pv.begin(), pv.begin() + static_cast<long>(T)), "pv_term"),
        TimeSeries(0, std::move(d), "d"),
        TimeSeries(0, std::move(f), "f"),
        TimeSeries(0, std::move(bubble_path), "b"),
        TimeSeries(0, std::move(p), "p"),
        TimeSeries(0, std::move(drift), "drift"),
        sigma_eps,
        obs_noise_sd,
    };
    return economy;
}

}  // namespace bubblelab::dgp
