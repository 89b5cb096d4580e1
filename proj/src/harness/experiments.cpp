#include "bubblelab/harness/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bubblelab/adjust/adjust.hpp"
#include "bubblelab/core/csv.hpp"
#include "bubblelab/core/detrend.hpp"
#include "bubblelab/core/parallel.hpp"
#include "bubblelab/core/rng.hpp"
#include "bubblelab/errors.hpp"
#include "detail.hpp"

namespace bubblelab::harness {
namespace {

std::string shape_label(dgp::ShockShape shape) {
    switch (shape) {
        case dgp::ShockShape::Triangular:
            return "triangular";
        case dgp::ShockShape::Gaussian:
            return "gaussian";
        case dgp::ShockShape::Beta:
            return "beta";
        case dgp::ShockShape::GammaLike:
            return "gamma_like";
    }
    throw usage_error("invalid_config", "unknown shock shape");
}

/// One cell of the experiment grid, in row-major task order.
struct GridPoint {
    std::string label;
    double value = 0.0;
    dgp::ShockShape shape = dgp::ShockShape::Triangular;
};

std::vector<GridPoint> enumerate_grid(const ExperimentSpec& spec) {
    std::vector<GridPoint> points;
    if (spec.id == ExperimentId::Shapes) {
        points.reserve(spec.shapes.size() * spec.grid.size());
        for (dgp::ShockShape shape : spec.shapes) {
            for (double v : spec.grid) {
                points.push_back(
                    {shape_label(shape) + " delta_max=" + csv::format_double(v), v, shape});
            }
        }
        return points;
    }
    const char* key = spec.id == ExperimentId::C
                          ? "rho="
                          : (spec.id == ExperimentId::Stochastic ? "cv=" : "delta_max=");
    points.reserve(spec.grid.size());
    for (double v : spec.grid) {
        points.push_back({key + csv::format_double(v), v, spec.profile.shape});
    }
    return points;
}

dgp::TechShockProfile with_peak(dgp::TechShockProfile profile, dgp::ShockShape shape,
                                double peak) {
    profile.shape = shape;
    profile.delta_max = peak;
    profile.require_valid();
    return profile;
}

struct SeriesPair {
    TimeSeries unadjusted;
    TimeSeries adjusted;
};

/// Designs A, C, and Shapes: simulate the economy, strip the known
/// deterministic trend C + c*t from the log price, and strip the true
/// technology terms for the oracle-adjusted run.
SeriesPair detrended_price_pair(const ExperimentSpec& spec, const dgp::TechShockProfile& profile,
                                const dgp::PresentValueModel& model, RngStream& stream) {
    const dgp::SimulatedEconomy econ =
        dgp::simulate_economy(profile, model, spec.T, spec.sigma_eps, std::nullopt, 0.0, stream);
    TimeSeries detrended = detail::subtract_deterministic_trend(
        econ.price, model.level_constant(), model.c, "p_detrended");
    TimeSeries adjusted =
        adjust::adjust_series(detrended, adjust::SeriesKind::LogPrice, econ.delta, econ.pv_term);
    return {std::move(detrended), std::move(adjusted)};
}

/// Design B: deterministic present-value path plus stationary AR(1)
/// measurement noise on the log price-dividend ratio. Consumes exactly T
/// standard normal draws (one for the stationary start, one per transition).
SeriesPair pd_ratio_pair(const ExperimentSpec& spec, const dgp::TechShockProfile& profile,
                         RngStream& stream) {
    const double level = spec.model.level_constant();
    const double phi = spec.pd_noise.persistence;
    const double sd = spec.pd_noise.innovation_sd;
    const double stationary_sd = sd / std::sqrt(1.0 - phi * phi);
    std::vector<double> pv(spec.T, 0.0);
    for (std::size_t t = 0; t < spec.T; ++t) {
        pv[t] = dgp::pv_term(profile, spec.model.rho, static_cast<long>(t));
    }
    std::vector<double> y(spec.T, 0.0);
    double noise = stationary_sd * stream.normal();
    y[0] = level + pv[0] + noise;
    for (std::size_t t = 1; t < spec.T; ++t) {
        noise = phi * noise + sd * stream.normal();
        y[t] = level + pv[t] + noise;
    }
    TimeSeries ratio(0, std::move(y), "pd_ratio");
    TimeSeries pv_series(0, std::move(pv), "pv_term");
    TimeSeries delta_series(0, dgp::delta_path(profile, spec.T), "delta");
    TimeSeries adjusted =
        adjust::adjust_series(ratio, adjust::SeriesKind::PDRatio, delta_series, pv_series);
    return {std::move(ratio), std::move(adjusted)};
}

/// Stochastic design: filtered economy under an uncertain cumulative impact.
/// PdRatio tests the model-implied ratio; DetrendedLogPrice tests the
/// OLS-detrended log price. Both adjust with the filtered (observable)
/// technology terms, not the realized draw.
SeriesPair stochastic_pair(const ExperimentSpec& spec, double coefficient_of_variation,
                           RngStream& stream) {
    const dgp::StochasticTechSpec tech =
        dgp::StochasticTechSpec::from_profile(spec.profile, coefficient_of_variation, spec.sigma_xi);
    const bool pd_panel = spec.panel == StochasticPanel::PdRatio;
    std::optional<dgp::Ar1NoiseSpec> ratio_noise;
    if (pd_panel) {
        ratio_noise = spec.pd_noise;
    }
    const dgp::StochasticSimulation sim = dgp::simulate_stochastic_economy(
        tech, spec.model, spec.T, spec.sigma_eps, ratio_noise, stream);
    if (pd_panel) {
        TimeSeries adjusted = adjust::adjust_series(sim.pd_ratio, adjust::SeriesKind::PDRatio,
                                                    sim.economy.delta, sim.economy.pv_term);
        return {sim.pd_ratio, std::move(adjusted)};
    }
    TimeSeries unadjusted = detrend_linear(sim.economy.price);
    TimeSeries adjusted = detrend_linear(adjust::adjust_series(
        sim.economy.price, adjust::SeriesKind::LogPrice, sim.economy.delta, sim.economy.pv_term));
    return {std::move(unadjusted), std::move(adjusted)};
}

SeriesPair simulate_pair(const ExperimentSpec& spec, const GridPoint& point, RngStream& stream) {
    switch (spec.id) {
        case ExperimentId::A:
        case ExperimentId::Shapes:
            return detrended_price_pair(spec, with_peak(spec.profile, point.shape, point.value),
                                        spec.model, stream);
        case ExperimentId::B:
            return pd_ratio_pair(spec, with_peak(spec.profile, spec.profile.shape, point.value),
                                 stream);
        case ExperimentId::C: {
            const dgp::PresentValueModel model = dgp::PresentValueModel::baseline(
                point.value, spec.model.c, spec.model.r_bar, spec.model.phi);
            return detrended_price_pair(spec, spec.profile, model, stream);
        }
        case ExperimentId::Stochastic:
            return stochastic_pair(spec, point.value, stream);
        case ExperimentId::Overlap:
            break;
    }
    throw usage_error("invalid_config", "no per-replication design for this experiment id");
}

/// Scores every (grid point, replication) task against the scalar threshold
/// and reduces rejection indicators into per-point rates. `stream_for_task`
/// decides the variance-reduction scheme: fresh streams per task for the
/// independent designs, per-replication streams for common random numbers.
RejectionTable run_grid(const ExperimentSpec& spec, unsigned n_workers, bool common_random) {
    std::optional<psy::CriticalValueTable> storage;
    const psy::CriticalValueTable& table = detail::resolve_null_table(spec, storage, n_workers);
    const double threshold = detail::gsadf_cv_at(table, spec.level);
    const std::vector<GridPoint> points = enumerate_grid(spec);
    const psy::PsyConfig data_cfg{psy::default_r0(spec.T), spec.lag_K};
    const std::size_t n_tasks = points.size() * spec.M;
    std::vector<unsigned char> reject_unadjusted(n_tasks, 0);
    std::vector<unsigned char> reject_adjusted(n_tasks, 0);
    parallel_for(n_tasks, n_workers, [&](std::size_t task) {
        const std::uint64_t stream_id =
            common_random ? static_cast<std::uint64_t>(task % spec.M)
                          : static_cast<std::uint64_t>(task);
        RngStream stream(spec.seed, stream_id);
        const SeriesPair pair = simulate_pair(spec, points[task / spec.M], stream);
        reject_unadjusted[task] = psy::gsadf(pair.unadjusted, data_cfg).gsadf > threshold ? 1 : 0;
        reject_adjusted[task] = psy::gsadf(pair.adjusted, data_cfg).gsadf > threshold ? 1 : 0;
    });
    RejectionTable out;
    out.spec = spec;
    out.spec.critical_values = nullptr;
    out.r0_fraction = table.r0_fraction;
    out.cv_threshold = threshold;
    out.rows.reserve(points.size());
    for (std::size_t g = 0; g < points.size(); ++g) {
        std::size_t n_unadjusted = 0;
        std::size_t n_adjusted = 0;
        for (std::size_t m = 0; m < spec.M; ++m) {
            n_unadjusted += reject_unadjusted[g * spec.M + m];
            n_adjusted += reject_adjusted[g * spec.M + m];
        }
        const double reps = static_cast<double>(spec.M);
        out.rows.push_back({points[g].label, points[g].value,
                            static_cast<double>(n_unadjusted) / reps,
                            static_cast<double>(n_adjusted) / reps, spec.M});
    }
    return out;
}

std::vector<double> peak_grid() {
    std::vector<double> grid(11, 0.0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        grid[i] = static_cast<double>(i) / 50.0;  // 0.00, 0.02, ..., 0.20 exactly
    }
    return grid;
}

dgp::TechShockProfile triangular_window(double delta_max) {
    dgp::TechShockProfile profile;
    profile.shape = dgp::ShockShape::Triangular;
    profile.delta_max = delta_max;
    profile.T1 = 80;
    profile.T2 = 200;
    profile.tau = 30;
    return profile;
}

dgp::Ar1NoiseSpec calibrated_ratio_noise() {
    // Stationary sd 0.15 with persistence 0.95.
    return {0.95, 0.15 * std::sqrt(1.0 - 0.95 * 0.95)};
}

}  // namespace

ExperimentSpec ExperimentSpec::experiment_a(std::uint64_t seed, std::size_t M) {
    ExperimentSpec spec;
    spec.id = ExperimentId::A;
    spec.grid = peak_grid();
    spec.M = M;
    spec.T = 300;
    spec.model = dgp::PresentValueModel::baseline();
    spec.profile = triangular_window(0.15);
    spec.sigma_eps = 0.10;
    spec.level = 0.05;
    spec.lag_K = 1;
    spec.seed = seed;
    return spec;
}

ExperimentSpec ExperimentSpec::experiment_b(std::uint64_t seed, std::size_t M) {
    ExperimentSpec spec = experiment_a(seed, M);
    spec.id = ExperimentId::B;
    spec.pd_noise = calibrated_ratio_noise();
    return spec;
}

ExperimentSpec ExperimentSpec::experiment_c(std::uint64_t seed, std::size_t M) {
    ExperimentSpec spec = experiment_a(seed, M);
    spec.id = ExperimentId::C;
    spec.grid = {0.90, 0.93, 0.95, 0.97, 0.98, 0.99};
    return spec;
}

ExperimentSpec ExperimentSpec::shape_robustness(std::uint64_t seed, std::size_t M) {
    ExperimentSpec spec = experiment_a(seed, M);
    spec.id = ExperimentId::Shapes;
    spec.shapes = {dgp::ShockShape::Triangular, dgp::ShockShape::Gaussian, dgp::ShockShape::Beta,
                   dgp::ShockShape::GammaLike};
    return spec;
}

ExperimentSpec ExperimentSpec::stochastic_grid(StochasticPanel panel, std::uint64_t seed,
                                               std::size_t M) {
    ExperimentSpec spec;
    spec.id = ExperimentId::Stochastic;
    spec.panel = panel;
    spec.grid = {0.0, 0.05, 0.10, 0.15, 0.20, 0.30, 0.40, 0.50, 0.75, 1.00};
    spec.M = M;
    spec.T = 300;
    spec.model = dgp::PresentValueModel::baseline();
    spec.profile = triangular_window(panel == StochasticPanel::PdRatio ? 0.04 : 0.06);
    spec.sigma_eps = 0.10;
    spec.level = 0.05;
    spec.lag_K = 1;
    spec.seed = seed;
    spec.pd_noise = calibrated_ratio_noise();
    spec.sigma_xi = 0.005;
    return spec;
}

ExperimentSpec ExperimentSpec::overlap(std::uint64_t seed) {
    ExperimentSpec spec;
    spec.id = ExperimentId::Overlap;
    spec.T = 300;
    spec.model = dgp::PresentValueModel::baseline();
    spec.profile.shape = dgp::ShockShape::GammaLike;
    spec.profile.delta_max = 0.25;
    spec.profile.T1 = 50;
    spec.profile.T2 = 150;
    spec.profile.tau = 30;
    spec.sigma_eps = 0.10;
    spec.level = 0.05;
    spec.lag_K = 1;
    spec.seed = seed;
    spec.bubble = dgp::BubbleSpec{.start = 100,
                                  .end = 200,
                                  .b_init = 0.3,
                                  .rho_bubble = 1.035,
                                  .innovation_sd = 0.10,
                                  .collapse_factor = 0.5};
    spec.obs_noise_sd = 0.30;
    return spec;
}

void ExperimentSpec::require_valid() const {
    if (M < 50) {
        throw usage_error("invalid_config", "need at least 50 replications per grid point");
    }
    if (T < 30) {
        throw usage_error("invalid_config", "sample length must be at least 30");
    }
    if (!std::isfinite(level) || !(level > 0.0 && level < 0.5)) {
        throw usage_error("invalid_config", "test level must lie in (0, 0.5)");
    }
    model.require_valid();
    profile.require_valid();
    if (id == ExperimentId::Overlap) {
        if (bubble) {
            bubble->require_valid();
        }
        if (!std::isfinite(obs_noise_sd) || obs_noise_sd < 0.0) {
            throw usage_error("invalid_config", "observation noise sd must be non-negative");
        }
        return;
    }
    if (grid.empty()) {
        throw usage_error("invalid_config", "gridded designs need a non-empty grid");
    }
    for (double v : grid) {
        if (!std::isfinite(v)) {
            throw usage_error("invalid_config", "grid values must be finite");
        }
        if (id == ExperimentId::C && !(v > 0.0 && v < 1.0)) {
            throw usage_error("invalid_config", "discount factors must lie in (0, 1)");
        }
        if (id != ExperimentId::C && v < 0.0) {
            throw usage_error("invalid_config", "grid values must be non-negative");
        }
    }
    if (id == ExperimentId::Shapes && shapes.empty()) {
        throw usage_error("invalid_config", "shape robustness needs at least one shape family");
    }
    if (id == ExperimentId::Stochastic && !(sigma_xi > 0.0)) {
        throw usage_error("invalid_config", "signal noise sd must be positive");
    }
    const bool uses_ratio_noise =
        id == ExperimentId::B ||
        (id == ExperimentId::Stochastic && panel == StochasticPanel::PdRatio);
    if (uses_ratio_noise && !(std::abs(pd_noise.persistence) < 1.0)) {
        throw usage_error("invalid_config",
                          "ratio-noise persistence must lie inside the unit circle");
    }
}

RejectionTable run_experiment(const ExperimentSpec& spec, unsigned n_workers) {
    spec.require_valid();
    switch (spec.id) {
        case ExperimentId::A:
        case ExperimentId::B:
        case ExperimentId::C:
        case ExperimentId::Shapes:
            return run_grid(spec, n_workers, /*common_random=*/false);
        case ExperimentId::Stochastic:
        case ExperimentId::Overlap:
            break;
    }
    throw usage_error("invalid_config",
                      "run_experiment covers designs A, B, C, and Shapes; use "
                      "run_stochastic_grid or run_overlap");
}

RejectionTable run_stochastic_grid(const ExperimentSpec& spec, unsigned n_workers) {
    spec.require_valid();
    if (spec.id != ExperimentId::Stochastic) {
        throw usage_error("invalid_config", "run_stochastic_grid needs the stochastic design");
    }
    return run_grid(spec, n_workers, /*common_random=*/true);
}

void write_rejection_csv(const std::string& path, const RejectionTable& table) {
    csv::Table out;
    out.header = {"grid_value", "label", "unadjusted", "adjusted", "n_reps"};
    out.rows.reserve(table.rows.size());
    for (const RejectionRow& row : table.rows) {
        out.rows.push_back({csv::format_double(row.grid_value), row.label,
                            csv::format_double(row.unadjusted_rate),
                            csv::format_double(row.adjusted_rate), std::to_string(row.n_reps)});
    }
    csv::write_table(path, out);
}

void write_shapes_csv(const std::string& path, const RejectionTable& table) {
    const ExperimentSpec& spec = table.spec;
    if (spec.id != ExperimentId::Shapes) {
        throw usage_error("invalid_config", "shape pivot needs a shape-robustness table");
    }
    const std::size_t n_shapes = spec.shapes.size();
    const std::size_t n_values = spec.grid.size();
    if (table.rows.size() != n_shapes * n_values) {
        throw data_error("alignment", "table rows do not cover every shape/grid pair");
    }
    csv::Table out;
    out.header.push_back("delta_max");
    for (dgp::ShockShape shape : spec.shapes) {
        out.header.push_back(shape_label(shape));
    }
    out.rows.reserve(n_values);
    for (std::size_t v = 0; v < n_values; ++v) {
        std::vector<std::string> row;
        row.reserve(n_shapes + 1);
        row.push_back(csv::format_double(spec.grid[v]));
        for (std::size_t s = 0; s < n_shapes; ++s) {
            const RejectionRow& cell = table.rows[s * n_values + v];
            if (cell.grid_value != spec.grid[v]) {
                throw data_error("alignment", "row order does not match the spec grid");
            }
            row.push_back(csv::format_double(cell.unadjusted_rate));
        }
        out.rows.push_back(std::move(row));
    }
    csv::write_table(path, out);
}

void write_stochastic_csv(const std::string& path, const RejectionTable& table) {
    if (table.spec.id != ExperimentId::Stochastic) {
        throw usage_error("invalid_config", "this layout needs a stochastic-grid table");
    }
    if (table.rows.empty()) {
        throw data_error("alignment", "cannot write an empty table");
    }
    csv::Table out;
    out.header = {"cv", "unadjusted", "delta_pp", "adjusted"};
    out.rows.reserve(table.rows.size());
    const double base_rate = table.rows.front().unadjusted_rate;
    for (const RejectionRow& row : table.rows) {
        out.rows.push_back({csv::format_double(row.grid_value),
                            csv::format_double(row.unadjusted_rate),
                            csv::format_double((row.unadjusted_rate - base_rate) * 100.0),
                            csv::format_double(row.adjusted_rate)});
    }
    csv::write_table(path, out);
}

namespace detail {

const psy::CriticalValueTable& resolve_null_table(const ExperimentSpec& spec,
                                                  std::optional<psy::CriticalValueTable>& storage,
                                                  unsigned n_workers) {
    const double r0 = psy::default_r0(spec.T);
    if (spec.critical_values != nullptr) {
        const psy::CriticalValueTable& table = *spec.critical_values;
        if (table.T != spec.T) {
            throw data_error("cv_length_mismatch",
                             "critical values were simulated for a different sample length");
        }
        if (std::abs(table.r0_fraction - r0) > 1e-12) {
            throw data_error("cv_key_mismatch",
                             "critical values use a different minimum-window fraction");
        }
        return table;
    }
    std::vector<double> levels{0.10, 0.05, 0.01};
    if (std::find(levels.begin(), levels.end(), spec.level) == levels.end()) {
        levels.push_back(spec.level);
    }
    const psy::PsyConfig null_cfg{r0, 0};
    storage = psy::simulate_critical_values(spec.T, null_cfg, levels, spec.cv_reps,
                                            spec.seed ^ kNullTableSeedSalt, n_workers);
    return *storage;
}

double gsadf_cv_at(const psy::CriticalValueTable& table, double level) {
    for (std::size_t i = 0; i < table.levels.size(); ++i) {
        if (table.levels[i] == level) {
            return table.gsadf_cv[i];
        }
    }
    throw data_error("unknown_level", "critical-value table does not carry the requested level");
}

TimeSeries subtract_deterministic_trend(const TimeSeries& y, double intercept, double slope,
                                        std::string label) {
    std::vector<double> values(y.values.size(), 0.0);
    for (std::size_t t = 0; t < values.size(); ++t) {
        values[t] = y.values[t] - intercept - slope * static_cast<double>(t);
    }
    return TimeSeries(y.start_index, std::move(values), std::move(label));
}

}  // namespace detail
}  // namespace bubblelab::harness
