/// Command-line front end for the explosive-root testing engine.
///
/// Seven subcommands cover the pipeline: `simulate` generates economies,
/// `cv` simulates critical-value tables, `psy` runs the recursive
/// explosiveness test on a series, `dols` fits the long-run relation,
/// `adjust` runs the full counterfactual decomposition, `mc` reproduces the
/// pre-registered Monte-Carlo designs, and `diagnose` runs the supporting
/// cointegration diagnostics.
///
/// Conventions shared by every command:
///  - Inputs are CSVs whose first column is `t` (consecutive integers) or
///    `date` (consecutive YYYY-MM months, translated to integer indices with
///    the mapping recorded in the run manifest).
///  - `--config FILE` reads a flat key=value file whose keys are this
///    command's long option names; explicit command-line flags win. Unknown
///    keys are rejected before any computation starts.
///  - Every run writes `<command>_manifest.txt` into --out: a rerunnable
///    config capturing all resolved parameters.
///  - Exit codes: 0 success, 2 usage errors, 3 data errors, 4 numeric
///    failures; the matching machine-readable line goes to stderr as
///    `error: category=<usage|data|numeric> code=<code> <message>`.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bubblelab/adjust/adjust.hpp"
#include "bubblelab/cli/ingest.hpp"
#include "bubblelab/cli/support.hpp"
#include "bubblelab/coint/cointegration.hpp"
#include "bubblelab/coint/engle_granger.hpp"
#include "bubblelab/coint/granger.hpp"
#include "bubblelab/coint/hansen.hpp"
#include "bubblelab/coint/pca.hpp"
#include "bubblelab/core/csv.hpp"
#include "bubblelab/core/rng.hpp"
#include "bubblelab/dgp/economy.hpp"
#include "bubblelab/dgp/profile.hpp"
#include "bubblelab/dgp/stochastic.hpp"
#include "bubblelab/errors.hpp"
#include "bubblelab/harness/harness.hpp"
#include "bubblelab/psy/psy.hpp"

namespace {

using namespace bubblelab;

[[nodiscard]] std::string fmt(double x) { return csv::format_double(x); }

[[nodiscard]] std::string artifact_path(const std::string& out_dir, const std::string& name) {
    return (std::filesystem::path(out_dir) / name).string();
}

void ensure_out_dir(const std::string& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) {
        throw data_error("write_failed", "cannot create output directory '" + out_dir + "'");
    }
}

[[nodiscard]] std::string join_doubles(const std::vector<double>& values) {
    std::string joined;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i > 0) joined += ",";
        joined += fmt(values[i]);
    }
    return joined;
}

[[nodiscard]] dgp::ShockShape parse_shape(const std::string& name) {
    if (name == "triangular") return dgp::ShockShape::Triangular;
    if (name == "gaussian") return dgp::ShockShape::Gaussian;
    if (name == "beta") return dgp::ShockShape::Beta;
    return dgp::ShockShape::GammaLike;
}

/// Critical-value levels for a run: the standard 10/5/1 percent trio plus the
/// date-stamping level when it is not already one of them.
[[nodiscard]] std::vector<double> levels_with(double level) {
    std::vector<double> levels{0.10, 0.05, 0.01};
    if (std::find(levels.begin(), levels.end(), level) == levels.end()) {
        levels.push_back(level);
    }
    return levels;
}

/// Date-mapping manifest notes shared by every command that ingests files.
[[nodiscard]] std::vector<std::string> mapping_notes(const std::optional<cli::DateMapping>& mapping) {
    std::vector<std::string> notes;
    if (mapping) {
        notes.push_back("date_start=" + mapping->date_at(0) + " (index 0)");
        notes.push_back("date_step_months=" + std::to_string(mapping->month_step));
    }
    return notes;
}

// ---------------------------------------------------------------------------
// Input selection shared by dols, adjust, and diagnose.
// ---------------------------------------------------------------------------

struct DesignInputs {
    TimeSeries target;
    Frame covariates;
    std::optional<cli::DateMapping> mapping;
};

/// Ingests the main (monthly) frame, optionally merges an upsampled quarterly
/// frame, and splits the result into the target series and covariate columns.
[[nodiscard]] DesignInputs load_design(const std::string& input, const std::string& quarterly,
                                       const std::string& target, const std::string& covariates) {
    DesignInputs design;
    Frame frame = cli::ingest_frame(input, &design.mapping);
    if (!quarterly.empty()) {
        std::optional<cli::DateMapping> quarterly_mapping;
        const Frame raw = cli::ingest_frame(quarterly, &quarterly_mapping, 3);
        Frame monthly = cli::upsample_quarterly(raw);
        if (design.mapping.has_value() != quarterly_mapping.has_value()) {
            throw usage_error("invalid_config", "'" + input + "' and '" + quarterly +
                                                    "' must both use dates or both use integer t");
        }
        if (design.mapping) {
            const long main_base = 12L * design.mapping->base_year + design.mapping->base_month - 1;
            const long quarterly_base =
                12L * quarterly_mapping->base_year + quarterly_mapping->base_month - 1;
            monthly.set_start_index(monthly.start_index() + (quarterly_base - main_base));
        }
        frame = cli::merge_frames(frame, monthly);
    }
    if (!frame.has_column(target)) {
        throw data_error("schema", "no column '" + target + "' in the input");
    }
    if (covariates.empty()) {
        design.covariates = frame.without_column(target);
    } else {
        Frame selected(frame.start_index());
        for (const std::string& name : cli::split_list(covariates)) {
            if (name == target) {
                throw usage_error("invalid_config",
                                  "target column '" + target + "' cannot also be a covariate");
            }
            if (!frame.has_column(name)) {
                throw data_error("schema", "no column '" + name + "' in the input");
            }
            selected.add_column(name, frame.column(name));
        }
        design.covariates = std::move(selected);
    }
    if (design.covariates.n_cols() == 0) {
        throw usage_error("invalid_config", "no covariate columns besides the target");
    }
    design.target = frame.series(target);
    return design;
}

/// Resolved covariate list echoed into manifests.
[[nodiscard]] std::string join_names(const Frame& frame) {
    std::string joined;
    for (std::size_t c = 0; c < frame.n_cols(); ++c) {
        if (c > 0) joined += ",";
        joined += frame.name_at(c);
    }
    return joined;
}

// ---------------------------------------------------------------------------
// cv
// ---------------------------------------------------------------------------

struct CvArgs {
    std::size_t T = 0;
    std::string r0 = "auto";
    std::size_t lag = 0;
    std::size_t reps = 2000;
    std::string levels = "0.10,0.05,0.01";
    std::uint64_t seed = 777;
    unsigned workers = 1;
    std::string out = ".";
    std::string config;
};

int run_cv(const CvArgs& a) {
    ensure_out_dir(a.out);
    const double r0 = cli::resolve_r0(a.r0, a.T);
    const std::vector<double> levels = cli::parse_double_list(a.levels, "--levels");
    const psy::PsyConfig cfg{r0, a.lag};
    const psy::CriticalValueTable table =
        psy::simulate_critical_values(a.T, cfg, levels, a.reps, a.seed, a.workers);
    psy::write_critical_values(table, artifact_path(a.out, "cv_scalar.csv"),
                               artifact_path(a.out, "cv_sequence.csv"));
    std::cout << "table key: " << psy::cv_cache_stem(a.T, r0, a.lag, a.reps, a.seed) << "\n";
    for (std::size_t i = 0; i < table.levels.size(); ++i) {
        std::cout << "level " << fmt(table.levels[i]) << ": gsadf cv " << fmt(table.gsadf_cv[i])
                  << "\n";
    }
    cli::write_manifest(a.out, "cv", {},
                        {{"T", std::to_string(a.T)},
                         {"r0", fmt(r0)},
                         {"lag", std::to_string(a.lag)},
                         {"reps", std::to_string(a.reps)},
                         {"levels", join_doubles(levels)},
                         {"seed", std::to_string(a.seed)},
                         {"workers", std::to_string(a.workers)},
                         {"out", a.out}});
    return 0;
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct SimulateArgs {
    std::size_t T = 300;
    std::uint64_t seed = 0;
    double rho = 0.95;
    double c = 0.02;
    double r_bar = 0.06;
    double phi = 0.0;
    std::string shape = "triangular";
    double delta_max = 0.15;
    long t1 = 80;
    long t2 = 200;
    long tau = 30;
    double gaussian_sigma = 0.0;
    double beta_a = 2.0;
    double beta_b = 5.0;
    double sigma_eps = 0.10;
    long bubble_start = -1;
    long bubble_end = 200;
    double bubble_init = 0.1;
    double bubble_rho = 1.035;
    double bubble_sd = 0.0;
    double bubble_collapse = 0.5;
    double obs_noise_sd = 0.0;
    double stochastic_cv = -1.0;
    double sigma_xi = 0.005;
    double ratio_persistence = 0.95;
    double ratio_sd = 0.0;
    std::string out = ".";
    std::string config;
};

int run_simulate(const SimulateArgs& a) {
    ensure_out_dir(a.out);
    const dgp::PresentValueModel model =
        dgp::PresentValueModel::baseline(a.rho, a.c, a.r_bar, a.phi);
    const dgp::TechShockProfile profile{parse_shape(a.shape), a.delta_max, a.t1,      a.t2,
                                        a.tau,               a.gaussian_sigma, a.beta_a, a.beta_b};
    RngStream stream(a.seed, 0);
    const bool stochastic = a.stochastic_cv >= 0.0;
    if (stochastic) {
        if (a.bubble_start >= 0) {
            throw usage_error("invalid_config",
                              "--bubble-start cannot be combined with --stochastic-cv");
        }
        const dgp::StochasticTechSpec spec =
            dgp::StochasticTechSpec::from_profile(profile, a.stochastic_cv, a.sigma_xi);
        std::optional<dgp::Ar1NoiseSpec> noise;
        if (a.ratio_sd > 0.0) noise = dgp::Ar1NoiseSpec{a.ratio_persistence, a.ratio_sd};
        const dgp::StochasticSimulation sim =
            dgp::simulate_stochastic_economy(spec, model, a.T, a.sigma_eps, noise, stream);
        csv::write_frame(artifact_path(a.out, "economy.csv"), sim.economy.to_frame());
        csv::write_series(artifact_path(a.out, "pd_ratio.csv"), sim.pd_ratio);
        csv::Table filter{{"t", "delta_hat", "variance"}, {}};
        filter.rows.reserve(sim.filter_path.size());
        for (std::size_t t = 0; t < sim.filter_path.size(); ++t) {
            filter.rows.push_back({std::to_string(t), fmt(sim.filter_path[t].delta_hat),
                                   fmt(sim.filter_path[t].P)});
        }
        csv::write_table(artifact_path(a.out, "filter.csv"), filter);
        std::cout << "realized cumulative impact: " << fmt(sim.delta_bar) << "\n";
        std::cout << "wrote economy.csv, pd_ratio.csv, filter.csv (" << a.T << " rows)\n";
    } else {
        std::optional<dgp::BubbleSpec> bubble;
        if (a.bubble_start >= 0) {
            bubble = dgp::BubbleSpec{a.bubble_start, a.bubble_end,    a.bubble_init,
                                     a.bubble_rho,   a.bubble_sd, a.bubble_collapse};
        }
        const dgp::SimulatedEconomy economy = dgp::simulate_economy(
            profile, model, a.T, a.sigma_eps, bubble, a.obs_noise_sd, stream);
        csv::write_frame(artifact_path(a.out, "economy.csv"), economy.to_frame());
        std::cout << "wrote economy.csv (" << a.T << " rows)\n";
    }
    cli::write_manifest(a.out, "simulate", {},
                        {{"T", std::to_string(a.T)},
                         {"seed", std::to_string(a.seed)},
                         {"rho", fmt(a.rho)},
                         {"c", fmt(a.c)},
                         {"r-bar", fmt(a.r_bar)},
                         {"phi", fmt(a.phi)},
                         {"shape", a.shape},
                         {"delta-max", fmt(a.delta_max)},
                         {"t1", std::to_string(a.t1)},
                         {"t2", std::to_string(a.t2)},
                         {"tau", std::to_string(a.tau)},
                         {"gaussian-sigma", fmt(a.gaussian_sigma)},
                         {"beta-a", fmt(a.beta_a)},
                         {"beta-b", fmt(a.beta_b)},
                         {"sigma-eps", fmt(a.sigma_eps)},
                         {"bubble-start", std::to_string(a.bubble_start)},
                         {"bubble-end", std::to_string(a.bubble_end)},
                         {"bubble-init", fmt(a.bubble_init)},
                         {"bubble-rho", fmt(a.bubble_rho)},
                         {"bubble-sd", fmt(a.bubble_sd)},
                         {"bubble-collapse", fmt(a.bubble_collapse)},
                         {"obs-noise-sd", fmt(a.obs_noise_sd)},
                         {"stochastic-cv", fmt(a.stochastic_cv)},
                         {"sigma-xi", fmt(a.sigma_xi)},
                         {"ratio-noise-persistence", fmt(a.ratio_persistence)},
                         {"ratio-noise-sd", fmt(a.ratio_sd)},
                         {"out", a.out}});
    return 0;
}

// ---------------------------------------------------------------------------
// psy
// ---------------------------------------------------------------------------

struct PsyArgs {
    std::string input;
    std::string column;
    std::string r0 = "auto";
    std::size_t lag = 1;
    double level = 0.05;
    std::string engine = "incremental";
    std::string cv_scalar;
    std::string cv_sequence;
    std::size_t cv_reps = 0;
    std::uint64_t cv_seed = 777;
    std::size_t cv_lag = 0;
    std::string out = ".";
    std::string config;
};

int run_psy(const PsyArgs& a) {
    ensure_out_dir(a.out);
    std::optional<cli::DateMapping> mapping;
    const TimeSeries y = cli::ingest_series(a.input, a.column, &mapping);
    const double r0 = cli::resolve_r0(a.r0, y.size());
    const psy::PsyConfig cfg{r0, a.lag};
    const psy::Engine engine =
        a.engine == "naive" ? psy::Engine::Naive : psy::Engine::Incremental;
    const psy::ExplosiveTestResult result = psy::gsadf(y, cfg, engine);

    std::optional<psy::CriticalValueTable> table;
    if (!a.cv_scalar.empty() || !a.cv_sequence.empty()) {
        if (a.cv_scalar.empty() || a.cv_sequence.empty()) {
            throw usage_error("invalid_config",
                              "--cv-scalar and --cv-sequence must be given together");
        }
        table = psy::read_critical_values(a.cv_scalar, a.cv_sequence, r0, a.cv_lag, a.cv_reps,
                                          a.cv_seed);
    } else if (a.cv_reps > 0) {
        table = psy::simulate_critical_values(y.size(), psy::PsyConfig{r0, a.cv_lag},
                                              levels_with(a.level), a.cv_reps, a.cv_seed, 1);
        psy::write_critical_values(*table, artifact_path(a.out, "cv_scalar.csv"),
                                   artifact_path(a.out, "cv_sequence.csv"));
    }

    std::vector<psy::Episode> episodes;
    if (table) episodes = psy::date_stamp(result, *table, a.level);

    csv::write_series(artifact_path(a.out, "psy_bsadf.csv"),
                      TimeSeries(y.start_index + static_cast<long>(result.first_r2),
                                 result.bsadf_sequence, "bsadf"));

    csv::Table summary{{"key", "value"}, {}};
    summary.rows.push_back({"gsadf", fmt(result.gsadf)});
    summary.rows.push_back(
        {"first_tested_index",
         std::to_string(y.start_index + static_cast<long>(result.first_r2))});
    summary.rows.push_back({"observations", std::to_string(y.size())});
    summary.rows.push_back({"r0", fmt(r0)});
    summary.rows.push_back({"lag", std::to_string(a.lag)});
    summary.rows.push_back({"engine", a.engine});
    summary.rows.push_back({"level", fmt(a.level)});
    if (table) {
        for (std::size_t i = 0; i < table->levels.size(); ++i) {
            summary.rows.push_back(
                {"gsadf_cv_" + fmt(table->levels[i]), fmt(table->gsadf_cv[i])});
        }
        summary.rows.push_back({"n_episodes", std::to_string(episodes.size())});
    }
    csv::write_table(artifact_path(a.out, "psy_summary.csv"), summary);

    if (table) {
        csv::Table rows{{"start", "end"}, {}};
        for (const psy::Episode& episode : episodes) {
            rows.rows.push_back(
                {std::to_string(y.start_index + static_cast<long>(episode.start)),
                 std::to_string(y.start_index + static_cast<long>(episode.end))});
        }
        csv::write_table(artifact_path(a.out, "psy_episodes.csv"), rows);
    }

    std::cout << "gsadf " << fmt(result.gsadf) << " over " << y.size()
              << " observations (r0 " << fmt(r0) << ", lag " << a.lag << ")\n";
    if (table) std::cout << "episodes at level " << fmt(a.level) << ": " << episodes.size() << "\n";

    cli::write_manifest(a.out, "psy", mapping_notes(mapping),
                        {{"input", a.input},
                         {"column", a.column},
                         {"r0", fmt(r0)},
                         {"lag", std::to_string(a.lag)},
                         {"level", fmt(a.level)},
                         {"engine", a.engine},
                         {"cv-scalar", a.cv_scalar},
                         {"cv-sequence", a.cv_sequence},
                         {"cv-reps", std::to_string(a.cv_reps)},
                         {"cv-seed", std::to_string(a.cv_seed)},
                         {"cv-lag", std::to_string(a.cv_lag)},
                         {"out", a.out}});
    return 0;
}

// ---------------------------------------------------------------------------
// dols
// ---------------------------------------------------------------------------

struct DolsArgs {
    std::string input;
    std::string quarterly;
    std::string target;
    std::string covariates;
    std::size_t leads = 2;
    std::size_t bandwidth = 4;
    std::string first;
    std::string last;
    std::string out = ".";
    std::string config;
};

int run_dols(const DolsArgs& a) {
    ensure_out_dir(a.out);
    DesignInputs design = load_design(a.input, a.quarterly, a.target, a.covariates);
    if (!a.first.empty() || !a.last.empty()) {
        const long first = a.first.empty() ? design.target.start_index
                                           : cli::parse_index(a.first, "--first");
        const long last =
            a.last.empty() ? design.target.end_index() : cli::parse_index(a.last, "--last");
        design.target = design.target.slice(first, last);
        design.covariates = design.covariates.slice(first, last);
    }
    const coint::CointFit fit =
        coint::dols_fit(design.target, design.covariates, a.leads, a.bandwidth);
    coint::write_fit_csv(artifact_path(a.out, "dols_fit.csv"), fit);
    csv::write_series(artifact_path(a.out, "dols_residuals.csv"),
                      TimeSeries(design.target.start_index, fit.residuals, "residual"));
    std::cout << "R^2 " << fmt(fit.r_squared) << ", adjusted R^2 " << fmt(fit.adj_r_squared)
              << ", " << fit.nobs << " regression rows\n";
    cli::write_manifest(a.out, "dols", mapping_notes(design.mapping),
                        {{"input", a.input},
                         {"quarterly", a.quarterly},
                         {"target", a.target},
                         {"covariates", join_names(design.covariates)},
                         {"leads", std::to_string(a.leads)},
                         {"bandwidth", std::to_string(a.bandwidth)},
                         {"first", a.first},
                         {"last", a.last},
                         {"out", a.out}});
    return 0;
}

// ---------------------------------------------------------------------------
// adjust
// ---------------------------------------------------------------------------

struct AdjustArgs {
    std::string input;
    std::string quarterly;
    std::string target;
    std::string covariates;
    long train_first = 0;
    long train_last = 0;
    long eval_first = 0;
    long eval_last = 0;
    std::string estimator = "dols";
    std::size_t leads = 2;
    std::size_t bandwidth = 4;
    std::size_t h = 0;
    std::string r0 = "auto";
    std::size_t lag = 1;
    double level = 0.05;
    std::string test_first;
    std::string test_last;
    std::string cv_scalar;
    std::string cv_sequence;
    std::size_t cv_reps = 0;
    std::uint64_t cv_seed = 777;
    std::size_t cv_lag = 0;
    std::string out = ".";
    std::string config;
};

int run_adjust(const AdjustArgs& a) {
    ensure_out_dir(a.out);
    const DesignInputs design = load_design(a.input, a.quarterly, a.target, a.covariates);

    adjust::AdjustmentPlan plan;
    plan.training = adjust::Span{a.train_first, a.train_last};
    plan.evaluation = adjust::Span{a.eval_first, a.eval_last};
    plan.estimator.kind = a.estimator == "fd" ? adjust::EstimatorSpec::Kind::FirstDifference
                                              : adjust::EstimatorSpec::Kind::Dols;
    plan.estimator.q_leads_lags = a.leads;
    plan.estimator.nw_bandwidth = a.bandwidth;
    plan.covariate_lag_h = a.h;
    if (!a.test_first.empty() || !a.test_last.empty()) {
        if (a.test_first.empty() || a.test_last.empty()) {
            throw usage_error("invalid_config",
                              "--test-first and --test-last must be given together");
        }
        plan.test_span = adjust::Span{cli::parse_index(a.test_first, "--test-first"),
                                      cli::parse_index(a.test_last, "--test-last")};
    }
    const adjust::Span provisional =
        plan.test_span ? *plan.test_span : adjust::Span{a.train_first, a.eval_last};
    const double r0 = cli::resolve_r0(a.r0, provisional.length());
    plan.psy_config = psy::PsyConfig{r0, a.lag};

    adjust::DecompositionResult result =
        adjust::run_decomposition(design.target, design.covariates, plan);

    std::optional<psy::CriticalValueTable> table;
    if (!a.cv_scalar.empty() || !a.cv_sequence.empty()) {
        if (a.cv_scalar.empty() || a.cv_sequence.empty()) {
            throw usage_error("invalid_config",
                              "--cv-scalar and --cv-sequence must be given together");
        }
        table = psy::read_critical_values(a.cv_scalar, a.cv_sequence, r0, a.cv_lag, a.cv_reps,
                                          a.cv_seed);
    } else if (a.cv_reps > 0) {
        table = psy::simulate_critical_values(result.tested.length(),
                                              psy::PsyConfig{r0, a.cv_lag}, levels_with(a.level),
                                              a.cv_reps, a.cv_seed, 1);
        psy::write_critical_values(*table, artifact_path(a.out, "cv_scalar.csv"),
                                   artifact_path(a.out, "cv_sequence.csv"));
    }
    if (table) {
        // Re-run with the table attached so its key is validated against the
        // span actually tested; the statistics themselves do not change.
        plan.critical_values = &*table;
        result = adjust::run_decomposition(design.target, design.covariates, plan);
    }

    csv::write_series(artifact_path(a.out, "adjust_gap.csv"), result.gap);
    csv::write_series(artifact_path(a.out, "adjust_counterfactual.csv"), result.counterfactual);
    coint::write_fit_csv(artifact_path(a.out, "adjust_fit.csv"), result.fit);

    std::vector<psy::Episode> unadjusted_episodes;
    std::vector<psy::Episode> adjusted_episodes;
    if (table) {
        unadjusted_episodes = psy::date_stamp(result.unadjusted_test, *table, a.level);
        adjusted_episodes = psy::date_stamp(result.adjusted_test, *table, a.level);
        const std::vector<adjust::RobustnessRow> rows{
            adjust::robustness_row("unadjusted", result.unadjusted_test, *table),
            adjust::robustness_row("adjusted", result.adjusted_test, *table)};
        adjust::write_robustness_csv(artifact_path(a.out, "adjust_tests.csv"), rows);
        csv::Table episodes{{"series", "start", "end"}, {}};
        const auto add_rows = [&](const char* label, const std::vector<psy::Episode>& list) {
            for (const psy::Episode& episode : list) {
                episodes.rows.push_back(
                    {label, std::to_string(result.tested.first + static_cast<long>(episode.start)),
                     std::to_string(result.tested.first + static_cast<long>(episode.end))});
            }
        };
        add_rows("unadjusted", unadjusted_episodes);
        add_rows("adjusted", adjusted_episodes);
        csv::write_table(artifact_path(a.out, "adjust_episodes.csv"), episodes);
    }

    csv::Table summary{{"key", "value"}, {}};
    summary.rows.push_back({"estimator", a.estimator});
    summary.rows.push_back({"tested_first", std::to_string(result.tested.first)});
    summary.rows.push_back({"tested_last", std::to_string(result.tested.last)});
    summary.rows.push_back({"gsadf_unadjusted", fmt(result.unadjusted_test.gsadf)});
    summary.rows.push_back({"gsadf_adjusted", fmt(result.adjusted_test.gsadf)});
    summary.rows.push_back({"r_squared", fmt(result.fit.r_squared)});
    summary.rows.push_back({"regression_rows", std::to_string(result.fit.nobs)});
    summary.rows.push_back({"r0", fmt(r0)});
    summary.rows.push_back({"lag", std::to_string(a.lag)});
    summary.rows.push_back({"level", fmt(a.level)});
    if (table) {
        for (std::size_t i = 0; i < table->levels.size(); ++i) {
            summary.rows.push_back(
                {"gsadf_cv_" + fmt(table->levels[i]), fmt(table->gsadf_cv[i])});
        }
        summary.rows.push_back({"n_episodes_unadjusted", std::to_string(unadjusted_episodes.size())});
        summary.rows.push_back({"n_episodes_adjusted", std::to_string(adjusted_episodes.size())});
    }
    csv::write_table(artifact_path(a.out, "adjust_summary.csv"), summary);

    std::cout << "tested span [" << result.tested.first << ", " << result.tested.last
              << "]: gsadf unadjusted " << fmt(result.unadjusted_test.gsadf) << ", adjusted "
              << fmt(result.adjusted_test.gsadf) << "\n";

    cli::write_manifest(a.out, "adjust", mapping_notes(design.mapping),
                        {{"input", a.input},
                         {"quarterly", a.quarterly},
                         {"target", a.target},
                         {"covariates", join_names(design.covariates)},
                         {"train-first", std::to_string(a.train_first)},
                         {"train-last", std::to_string(a.train_last)},
                         {"eval-first", std::to_string(a.eval_first)},
                         {"eval-last", std::to_string(a.eval_last)},
                         {"estimator", a.estimator},
                         {"leads", std::to_string(a.leads)},
                         {"bandwidth", std::to_string(a.bandwidth)},
                         {"h", std::to_string(a.h)},
                         {"r0", fmt(r0)},
                         {"lag", std::to_string(a.lag)},
                         {"level", fmt(a.level)},
                         {"test-first", a.test_first},
                         {"test-last", a.test_last},
                         {"cv-scalar", a.cv_scalar},
                         {"cv-sequence", a.cv_sequence},
                         {"cv-reps", std::to_string(a.cv_reps)},
                         {"cv-seed", std::to_string(a.cv_seed)},
                         {"cv-lag", std::to_string(a.cv_lag)},
                         {"out", a.out}});
    return 0;
}

// ---------------------------------------------------------------------------
// mc
// ---------------------------------------------------------------------------

struct McArgs {
    std::string experiment;
    std::size_t M = 0;  // 0 keeps the design's default replication count
    std::uint64_t seed = 0;
    unsigned workers = 1;
    double level = 0.05;
    std::size_t cv_reps = 500;
    std::uint64_t cv_seed = 777;
    std::string grid;
    std::string panel = "ratio";
    std::size_t paths = 1;
    std::string out = ".";
    std::string config;
};

int run_mc(const McArgs& a) {
    ensure_out_dir(a.out);
    harness::ExperimentSpec spec;
    if (a.experiment == "a") {
        spec = harness::ExperimentSpec::experiment_a(a.seed, a.M == 0 ? 200 : a.M);
    } else if (a.experiment == "b") {
        spec = harness::ExperimentSpec::experiment_b(a.seed, a.M == 0 ? 200 : a.M);
    } else if (a.experiment == "c") {
        spec = harness::ExperimentSpec::experiment_c(a.seed, a.M == 0 ? 200 : a.M);
    } else if (a.experiment == "shapes") {
        spec = harness::ExperimentSpec::shape_robustness(a.seed, a.M == 0 ? 200 : a.M);
    } else if (a.experiment == "stochastic") {
        const harness::StochasticPanel panel = a.panel == "price"
                                                   ? harness::StochasticPanel::DetrendedLogPrice
                                                   : harness::StochasticPanel::PdRatio;
        spec = harness::ExperimentSpec::stochastic_grid(panel, a.seed, a.M == 0 ? 500 : a.M);
    } else {
        spec = harness::ExperimentSpec::overlap(a.seed);
    }
    spec.level = a.level;
    spec.cv_reps = a.cv_reps;
    if (!a.grid.empty() && a.experiment != "overlap") {
        spec.grid = cli::parse_double_list(a.grid, "--grid");
    }

    // One null table shared by every replication (and every overlap path):
    // simulated on raw driftless random walks with lag 0, the convention all
    // pre-registered designs score against.
    const psy::CriticalValueTable table = psy::simulate_critical_values(
        spec.T, psy::PsyConfig{psy::default_r0(spec.T), 0}, levels_with(a.level), a.cv_reps,
        a.cv_seed, a.workers);
    spec.critical_values = &table;

    if (a.experiment == "overlap") {
        csv::Table detections{{"seed", "raw_first", "adjusted_first"}, {}};
        std::size_t raw_detecting = 0;
        std::size_t adjusted_detecting = 0;
        for (std::size_t i = 0; i < a.paths; ++i) {
            harness::ExperimentSpec path_spec = harness::ExperimentSpec::overlap(a.seed + i);
            path_spec.level = a.level;
            path_spec.cv_reps = a.cv_reps;
            path_spec.critical_values = &table;
            const harness::OverlapResult result = harness::run_overlap(path_spec, a.workers);
            if (i == 0) {
                harness::write_overlap_csv(artifact_path(a.out, "overlap_timeline.csv"), result,
                                           table);
                Frame series(result.raw_series.start_index);
                series.add_column("raw", result.raw_series.values);
                series.add_column("adjusted", result.adjusted_series.values);
                csv::write_frame(artifact_path(a.out, "overlap_series.csv"), series);
            }
            raw_detecting += result.first_detection_raw.has_value() ? 1 : 0;
            adjusted_detecting += result.first_detection_adjusted.has_value() ? 1 : 0;
            detections.rows.push_back(
                {std::to_string(a.seed + i),
                 result.first_detection_raw ? std::to_string(*result.first_detection_raw) : "-1",
                 result.first_detection_adjusted
                     ? std::to_string(*result.first_detection_adjusted)
                     : "-1"});
        }
        csv::write_table(artifact_path(a.out, "overlap_detections.csv"), detections);
        std::cout << "overlap paths: " << a.paths << ", raw detections " << raw_detecting
                  << ", adjusted detections " << adjusted_detecting << "\n";
    } else if (a.experiment == "stochastic") {
        const harness::RejectionTable rates = harness::run_stochastic_grid(spec, a.workers);
        harness::write_rejection_csv(artifact_path(a.out, "mc_rates.csv"), rates);
        harness::write_stochastic_csv(artifact_path(a.out, "mc_stochastic_summary.csv"), rates);
        for (const harness::RejectionRow& row : rates.rows) {
            std::cout << row.label << ": unadjusted " << fmt(row.unadjusted_rate) << ", adjusted "
                      << fmt(row.adjusted_rate) << " (" << row.n_reps << " reps)\n";
        }
    } else {
        const harness::RejectionTable rates = harness::run_experiment(spec, a.workers);
        harness::write_rejection_csv(artifact_path(a.out, "mc_rates.csv"), rates);
        if (a.experiment == "shapes") {
            harness::write_shapes_csv(artifact_path(a.out, "mc_shapes_pivot.csv"), rates);
        }
        for (const harness::RejectionRow& row : rates.rows) {
            std::cout << row.label << ": unadjusted " << fmt(row.unadjusted_rate) << ", adjusted "
                      << fmt(row.adjusted_rate) << " (" << row.n_reps << " reps)\n";
        }
    }

    cli::write_manifest(a.out, "mc", {},
                        {{"experiment", a.experiment},
                         {"M", std::to_string(spec.M)},
                         {"seed", std::to_string(a.seed)},
                         {"workers", std::to_string(a.workers)},
                         {"level", fmt(a.level)},
                         {"cv-reps", std::to_string(a.cv_reps)},
                         {"cv-seed", std::to_string(a.cv_seed)},
                         {"grid", a.experiment == "overlap" ? std::string() : join_doubles(spec.grid)},
                         {"panel", a.panel},
                         {"paths", std::to_string(a.paths)},
                         {"out", a.out}});
    return 0;
}

// ---------------------------------------------------------------------------
// diagnose
// ---------------------------------------------------------------------------

struct DiagnoseArgs {
    std::string input;
    std::string quarterly;
    std::string target;
    std::string covariates;
    std::size_t leads = 2;
    std::size_t bandwidth = 4;
    std::size_t eg_lag = 1;
    std::size_t max_lag = 6;
    std::size_t bootstrap = 499;
    std::uint64_t seed = 0;
    std::string out = ".";
    std::string config;
};

int run_diagnose(const DiagnoseArgs& a) {
    ensure_out_dir(a.out);
    const DesignInputs design = load_design(a.input, a.quarterly, a.target, a.covariates);
    const coint::CointFit fit =
        coint::dols_fit(design.target, design.covariates, a.leads, a.bandwidth);
    const coint::EngleGrangerResult eg =
        coint::engle_granger(TimeSeries(design.target.start_index, fit.residuals, "residual"),
                             a.eg_lag, 1 + design.covariates.n_cols());
    const coint::HansenResult hansen =
        coint::hansen_lc(design.target, design.covariates, a.leads, a.bandwidth);

    csv::Table diagnostics{{"diagnostic", "statistic", "p_value", "cv_5", "detail"}, {}};
    diagnostics.rows.push_back({"engle_granger_adf", fmt(eg.adf.t_stat), "", fmt(eg.cv_5),
                                std::string("reject_5=") + (eg.reject_5 ? "1" : "0")});
    diagnostics.rows.push_back({"engle_granger_flat", fmt(eg.adf.t_stat), "",
                                fmt(eg.flat_threshold),
                                std::string("reject=") + (eg.reject_flat ? "1" : "0")});
    std::string hansen_detail = "m=" + std::to_string(hansen.m_covariates);
    if (hansen.p_below_table) hansen_detail += ";p_below_table";
    if (hansen.p_above_table) hansen_detail += ";p_above_table";
    diagnostics.rows.push_back(
        {"hansen_lc", fmt(hansen.lc), fmt(hansen.p_value), fmt(hansen.cv_5), hansen_detail});
    for (std::size_t c = 0; c < design.covariates.n_cols(); ++c) {
        const std::string& name = design.covariates.name_at(c);
        RngStream stream(a.seed, c);
        const coint::GrangerResult granger = coint::granger_test(
            design.covariates.series(name), design.target, a.max_lag, a.bootstrap, stream);
        diagnostics.rows.push_back({"granger_" + name + "_to_" + a.target, fmt(granger.f_stat),
                                    fmt(granger.p_bootstrap),
                                    "",
                                    "lag=" + std::to_string(granger.lag_order) +
                                        ";p_standard=" + fmt(granger.p_standard)});
    }
    if (design.covariates.n_cols() >= 2) {
        const coint::PcaResult components = coint::pca(design.covariates, true);
        diagnostics.rows.push_back(
            {"pca_pc1_share", fmt(components.variance_explained[0]), "", "", ""});
        csv::Table loadings{{"component"}, {}};
        for (const std::string& name : components.series_names) loadings.header.push_back(name);
        for (long i = 0; i < components.loadings.rows(); ++i) {
            std::vector<std::string> row{"pc" + std::to_string(i + 1)};
            for (long j = 0; j < components.loadings.cols(); ++j) {
                row.push_back(fmt(components.loadings(i, j)));
            }
            loadings.rows.push_back(std::move(row));
        }
        csv::write_table(artifact_path(a.out, "pca_loadings.csv"), loadings);
        csv::write_frame(artifact_path(a.out, "pca_scores.csv"), components.scores);
    }
    csv::write_table(artifact_path(a.out, "diagnostics.csv"), diagnostics);

    for (const auto& row : diagnostics.rows) {
        std::cout << row[0] << ": " << row[1];
        if (!row[2].empty()) std::cout << " (p " << row[2] << ")";
        std::cout << "\n";
    }

    cli::write_manifest(a.out, "diagnose", mapping_notes(design.mapping),
                        {{"input", a.input},
                         {"quarterly", a.quarterly},
                         {"target", a.target},
                         {"covariates", join_names(design.covariates)},
                         {"leads", std::to_string(a.leads)},
                         {"bandwidth", std::to_string(a.bandwidth)},
                         {"eg-lag", std::to_string(a.eg_lag)},
                         {"max-lag", std::to_string(a.max_lag)},
                         {"bootstrap", std::to_string(a.bootstrap)},
                         {"seed", std::to_string(a.seed)},
                         {"out", a.out}});
    return 0;
}

// ---------------------------------------------------------------------------
// Wiring
// ---------------------------------------------------------------------------

/// Every option takes the last occurrence, so values injected from --config
/// (spliced in before the user's own flags) lose to explicit flags.
void apply_take_last(CLI::App* command) {
    for (CLI::Option* option : command->get_options()) {
        option->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    }
}

constexpr const char* kInputSchema =
    "Input CSVs carry a header row; the first column is 't' (consecutive integers) or 'date' "
    "(consecutive YYYY-MM months, translated to integer indices; the mapping lands in the "
    "manifest). All value cells must be finite numbers.";

[[nodiscard]] int dispatch(int argc, char** argv) {
    std::vector<std::string> args = cli::expand_config(argc, argv);

    CLI::App app{std::string("Explosive-root testing and fundamental/speculative decomposition "
                             "toolkit.\n") +
                 kInputSchema +
                 "\nEvery command accepts --config FILE (flat key=value, long option names as "
                 "keys; explicit flags win) and writes <command>_manifest.txt into --out, a "
                 "rerunnable config of all resolved parameters."};
    app.set_version_flag("--version", cli::kToolVersion);
    app.require_subcommand(1);

    // --- simulate ---------------------------------------------------------
    SimulateArgs sim;
    CLI::App* simulate = app.add_subcommand(
        "simulate",
        "Simulate a present-value economy with a hump-shaped technology-growth window.\n"
        "Artifacts: economy.csv (t,delta,pv_term,d,f,b,p,drift); with --stochastic-cv also "
        "pd_ratio.csv (t,pd_ratio) and filter.csv (t,delta_hat,variance).");
    simulate->add_option("--T", sim.T, "observations")->capture_default_str();
    simulate->add_option("--seed", sim.seed, "master seed")->capture_default_str();
    simulate->add_option("--rho", sim.rho, "discount factor")->capture_default_str();
    simulate->add_option("--c", sim.c, "trend dividend growth")->capture_default_str();
    simulate->add_option("--r-bar", sim.r_bar, "required return")->capture_default_str();
    simulate->add_option("--phi", sim.phi, "growth persistence leakage")->capture_default_str();
    simulate->add_option("--shape", sim.shape, "profile family")
        ->transform(CLI::IsMember({"triangular", "gaussian", "beta", "gamma_like"}))
        ->capture_default_str();
    simulate->add_option("--delta-max", sim.delta_max, "peak growth contribution")
        ->capture_default_str();
    simulate->add_option("--t1", sim.t1, "adoption date")->capture_default_str();
    simulate->add_option("--t2", sim.t2, "maturation date")->capture_default_str();
    simulate->add_option("--tau", sim.tau, "peak lag inside the window")->capture_default_str();
    simulate->add_option("--gaussian-sigma", sim.gaussian_sigma, "gaussian width (0 = window/4)")
        ->capture_default_str();
    simulate->add_option("--beta-a", sim.beta_a, "beta shape a")->capture_default_str();
    simulate->add_option("--beta-b", sim.beta_b, "beta shape b")->capture_default_str();
    simulate->add_option("--sigma-eps", sim.sigma_eps, "dividend innovation sd")
        ->capture_default_str();
    simulate->add_option("--bubble-start", sim.bubble_start, "bubble origination (-1 disables)")
        ->capture_default_str();
    simulate->add_option("--bubble-end", sim.bubble_end, "last explosive date")
        ->capture_default_str();
    simulate->add_option("--bubble-init", sim.bubble_init, "bubble level at origination")
        ->capture_default_str();
    simulate->add_option("--bubble-rho", sim.bubble_rho, "explosive root")->capture_default_str();
    simulate->add_option("--bubble-sd", sim.bubble_sd, "bubble innovation sd")
        ->capture_default_str();
    simulate->add_option("--bubble-collapse", sim.bubble_collapse, "post-collapse root")
        ->capture_default_str();
    simulate->add_option("--obs-noise-sd", sim.obs_noise_sd, "observation noise sd")
        ->capture_default_str();
    simulate
        ->add_option("--stochastic-cv", sim.stochastic_cv,
                     "prior coefficient of variation for an uncertain cumulative impact "
                     "(>= 0 switches to the learning economy; -1 disables)")
        ->capture_default_str();
    simulate->add_option("--sigma-xi", sim.sigma_xi, "signal noise sd (learning economy)")
        ->capture_default_str();
    simulate
        ->add_option("--ratio-noise-persistence", sim.ratio_persistence,
                     "AR root of the ratio noise")
        ->capture_default_str();
    simulate->add_option("--ratio-noise-sd", sim.ratio_sd, "ratio noise innovation sd")
        ->capture_default_str();
    simulate->add_option("--out", sim.out, "output directory")->capture_default_str();
    simulate->add_option("--config", sim.config, "flat key=value config file");

    // --- cv ----------------------------------------------------------------
    CvArgs cv;
    CLI::App* cv_cmd = app.add_subcommand(
        "cv",
        "Simulate critical values for the recursive explosiveness test under the driftless "
        "random-walk null.\nArtifacts: cv_scalar.csv (level,gsadf_cv) and cv_sequence.csv "
        "(r2_index plus one per-observation column per level).");
    cv_cmd->add_option("--T", cv.T, "sample length")->required();
    cv_cmd->add_option("--r0", cv.r0, "minimum window fraction or 'auto'")->capture_default_str();
    cv_cmd->add_option("--lag", cv.lag, "augmentation lag of the null regressions")
        ->capture_default_str();
    cv_cmd->add_option("--reps", cv.reps, "replications (>= 200)")->capture_default_str();
    cv_cmd->add_option("--levels", cv.levels, "comma-separated significance levels")
        ->capture_default_str();
    cv_cmd->add_option("--seed", cv.seed, "master seed")->capture_default_str();
    cv_cmd->add_option("--workers", cv.workers, "worker threads")->capture_default_str();
    cv_cmd->add_option("--out", cv.out, "output directory")->capture_default_str();
    cv_cmd->add_option("--config", cv.config, "flat key=value config file");

    // --- psy ----------------------------------------------------------------
    PsyArgs psy_args;
    CLI::App* psy_cmd = app.add_subcommand(
        "psy",
        "Run the recursive sup-ADF explosiveness test on one series.\nArtifacts: psy_bsadf.csv "
        "(t,bsadf), psy_summary.csv (key,value), and — when critical values are supplied via "
        "--cv-scalar/--cv-sequence or simulated via --cv-reps — psy_episodes.csv (start,end).");
    psy_cmd->add_option("--input", psy_args.input, "series CSV (t,<col>) or frame CSV")
        ->required();
    psy_cmd->add_option("--column", psy_args.column, "column to test when the input is a frame");
    psy_cmd->add_option("--r0", psy_args.r0, "minimum window fraction or 'auto'")
        ->capture_default_str();
    psy_cmd->add_option("--lag", psy_args.lag, "augmentation lag of the data regressions")
        ->capture_default_str();
    psy_cmd->add_option("--level", psy_args.level, "date-stamping level")->capture_default_str();
    psy_cmd->add_option("--engine", psy_args.engine, "statistic engine (naive is the slow oracle)")
        ->transform(CLI::IsMember({"incremental", "naive"}))
        ->capture_default_str();
    psy_cmd->add_option("--cv-scalar", psy_args.cv_scalar, "read critical values: scalar CSV");
    psy_cmd->add_option("--cv-sequence", psy_args.cv_sequence,
                        "read critical values: sequence CSV");
    psy_cmd->add_option("--cv-reps", psy_args.cv_reps,
                        "simulate critical values with this many replications (0 = skip)")
        ->capture_default_str();
    psy_cmd->add_option("--cv-seed", psy_args.cv_seed, "critical-value seed")
        ->capture_default_str();
    psy_cmd->add_option("--cv-lag", psy_args.cv_lag, "augmentation lag of the null regressions")
        ->capture_default_str();
    psy_cmd->add_option("--out", psy_args.out, "output directory")->capture_default_str();
    psy_cmd->add_option("--config", psy_args.config, "flat key=value config file");

    // --- dols ----------------------------------------------------------------
    DolsArgs dols;
    CLI::App* dols_cmd = app.add_subcommand(
        "dols",
        "Fit the long-run level relation by dynamic OLS with HAC standard errors.\nArtifacts: "
        "dols_fit.csv (variable,coef,se,t,p) and dols_residuals.csv (t,residual).");
    dols_cmd->add_option("--input", dols.input, "frame CSV with target and covariates")
        ->required();
    dols_cmd->add_option("--quarterly", dols.quarterly,
                         "quarterly frame CSV, upsampled to monthly and merged");
    dols_cmd->add_option("--target", dols.target, "dependent column")->required();
    dols_cmd->add_option("--covariates", dols.covariates,
                         "comma-separated covariate columns (default: all others)");
    dols_cmd->add_option("--leads", dols.leads, "difference leads/lags")->capture_default_str();
    dols_cmd->add_option("--bandwidth", dols.bandwidth, "HAC bandwidth")->capture_default_str();
    dols_cmd->add_option("--first", dols.first, "first index of the fitted span");
    dols_cmd->add_option("--last", dols.last, "last index of the fitted span");
    dols_cmd->add_option("--out", dols.out, "output directory")->capture_default_str();
    dols_cmd->add_option("--config", dols.config, "flat key=value config file");

    // --- adjust ---------------------------------------------------------------
    AdjustArgs adj;
    CLI::App* adjust_cmd = app.add_subcommand(
        "adjust",
        "Estimate a counterfactual fundamental on a training window, subtract it, and test the "
        "gap for explosiveness next to the raw series.\nArtifacts: adjust_gap.csv, "
        "adjust_counterfactual.csv, adjust_fit.csv, adjust_summary.csv (key,value); with "
        "critical values also adjust_tests.csv (specification,GSADF,CV10,CV05,CV01,rej10,rej05,"
        "rej01) and adjust_episodes.csv (series,start,end).");
    adjust_cmd->add_option("--input", adj.input, "frame CSV with target and covariates")
        ->required();
    adjust_cmd->add_option("--quarterly", adj.quarterly,
                           "quarterly frame CSV, upsampled to monthly and merged");
    adjust_cmd->add_option("--target", adj.target, "price column")->required();
    adjust_cmd->add_option("--covariates", adj.covariates,
                           "comma-separated covariate columns (default: all others)");
    adjust_cmd->add_option("--train-first", adj.train_first, "training start index")->required();
    adjust_cmd->add_option("--train-last", adj.train_last, "training end index")->required();
    adjust_cmd->add_option("--eval-first", adj.eval_first, "evaluation start index")->required();
    adjust_cmd->add_option("--eval-last", adj.eval_last, "evaluation end index")->required();
    adjust_cmd->add_option("--estimator", adj.estimator, "long-run estimator")
        ->transform(CLI::IsMember({"dols", "fd"}))
        ->capture_default_str();
    adjust_cmd->add_option("--leads", adj.leads, "DOLS difference leads/lags")
        ->capture_default_str();
    adjust_cmd->add_option("--bandwidth", adj.bandwidth, "HAC bandwidth")->capture_default_str();
    adjust_cmd->add_option("--h", adj.h, "covariate publication lag")->capture_default_str();
    adjust_cmd->add_option("--r0", adj.r0, "minimum window fraction or 'auto'")
        ->capture_default_str();
    adjust_cmd->add_option("--lag", adj.lag, "augmentation lag of the data regressions")
        ->capture_default_str();
    adjust_cmd->add_option("--level", adj.level, "date-stamping level")->capture_default_str();
    adjust_cmd->add_option("--test-first", adj.test_first,
                           "test span start (default: training start)");
    adjust_cmd->add_option("--test-last", adj.test_last, "test span end (default: evaluation end)");
    adjust_cmd->add_option("--cv-scalar", adj.cv_scalar, "read critical values: scalar CSV");
    adjust_cmd->add_option("--cv-sequence", adj.cv_sequence,
                           "read critical values: sequence CSV");
    adjust_cmd->add_option("--cv-reps", adj.cv_reps,
                           "simulate critical values with this many replications (0 = skip)")
        ->capture_default_str();
    adjust_cmd->add_option("--cv-seed", adj.cv_seed, "critical-value seed")
        ->capture_default_str();
    adjust_cmd->add_option("--cv-lag", adj.cv_lag, "augmentation lag of the null regressions")
        ->capture_default_str();
    adjust_cmd->add_option("--out", adj.out, "output directory")->capture_default_str();
    adjust_cmd->add_option("--config", adj.config, "flat key=value config file");

    // --- mc ---------------------------------------------------------------------
    McArgs mc;
    CLI::App* mc_cmd = app.add_subcommand(
        "mc",
        "Run one of the pre-registered Monte-Carlo designs.\nArtifacts: mc_rates.csv "
        "(grid_value,label,unadjusted,adjusted,n_reps); shapes adds mc_shapes_pivot.csv "
        "(delta_max,triangular,gaussian,beta,gamma_like); stochastic adds "
        "mc_stochastic_summary.csv (cv,unadjusted,delta_pp,adjusted); overlap instead writes "
        "overlap_timeline.csv (t,raw_bsadf,adjusted_bsadf,cv,raw_flag,adjusted_flag), "
        "overlap_series.csv (t,raw,adjusted), and overlap_detections.csv "
        "(seed,raw_first,adjusted_first; -1 = no detection).");
    mc_cmd->add_option("--experiment", mc.experiment, "design: a, b, c, shapes, stochastic, overlap")
        ->transform(CLI::IsMember({"a", "b", "c", "shapes", "stochastic", "overlap"},
                                  CLI::ignore_case))
        ->required();
    mc_cmd->add_option("--M", mc.M, "replications per grid point (0 = design default)")
        ->capture_default_str();
    mc_cmd->add_option("--seed", mc.seed, "master seed (required: runs must be replayable)")
        ->required();
    mc_cmd->add_option("--workers", mc.workers, "worker threads")->capture_default_str();
    mc_cmd->add_option("--level", mc.level, "rejection level")->capture_default_str();
    mc_cmd->add_option("--cv-reps", mc.cv_reps, "null-table replications")->capture_default_str();
    mc_cmd->add_option("--cv-seed", mc.cv_seed, "null-table seed")->capture_default_str();
    mc_cmd->add_option("--grid", mc.grid, "comma-separated grid override");
    mc_cmd->add_option("--panel", mc.panel, "stochastic design panel")
        ->transform(CLI::IsMember({"ratio", "price"}))
        ->capture_default_str();
    mc_cmd->add_option("--paths", mc.paths, "overlap: paths at seeds seed..seed+paths-1")
        ->capture_default_str();
    mc_cmd->add_option("--out", mc.out, "output directory")->capture_default_str();
    mc_cmd->add_option("--config", mc.config, "flat key=value config file");

    // --- diagnose -----------------------------------------------------------------
    DiagnoseArgs diag;
    CLI::App* diagnose_cmd = app.add_subcommand(
        "diagnose",
        "Cointegration and causality diagnostics for a target/covariate frame.\nArtifacts: "
        "diagnostics.csv (diagnostic,statistic,p_value,cv_5,detail); with >= 2 covariates also "
        "pca_loadings.csv (component,<series...>) and pca_scores.csv (t,pc1,...).");
    diagnose_cmd->add_option("--input", diag.input, "frame CSV with target and covariates")
        ->required();
    diagnose_cmd->add_option("--quarterly", diag.quarterly,
                             "quarterly frame CSV, upsampled to monthly and merged");
    diagnose_cmd->add_option("--target", diag.target, "dependent column")->required();
    diagnose_cmd->add_option("--covariates", diag.covariates,
                             "comma-separated covariate columns (default: all others)");
    diagnose_cmd->add_option("--leads", diag.leads, "DOLS difference leads/lags")
        ->capture_default_str();
    diagnose_cmd->add_option("--bandwidth", diag.bandwidth, "HAC bandwidth")
        ->capture_default_str();
    diagnose_cmd->add_option("--eg-lag", diag.eg_lag, "residual ADF augmentation lag")
        ->capture_default_str();
    diagnose_cmd->add_option("--max-lag", diag.max_lag, "largest causality lag (BIC selects)")
        ->capture_default_str();
    diagnose_cmd->add_option("--bootstrap", diag.bootstrap, "wild bootstrap replications")
        ->capture_default_str();
    diagnose_cmd->add_option("--seed", diag.seed, "bootstrap seed")->capture_default_str();
    diagnose_cmd->add_option("--out", diag.out, "output directory")->capture_default_str();
    diagnose_cmd->add_option("--config", diag.config, "flat key=value config file");

    for (CLI::App* command : app.get_subcommands({})) apply_take_last(command);

    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: category=usage code=cli_parse " << e.what() << "\n";
        return 2;
    }

    if (simulate->parsed()) return run_simulate(sim);
    if (cv_cmd->parsed()) return run_cv(cv);
    if (psy_cmd->parsed()) return run_psy(psy_args);
    if (dols_cmd->parsed()) return run_dols(dols);
    if (adjust_cmd->parsed()) return run_adjust(adj);
    if (mc_cmd->parsed()) return run_mc(mc);
    return run_diagnose(diag);
}

[[nodiscard]] const char* category_name(ErrorCategory category) {
    switch (category) {
        case ErrorCategory::Usage: return "usage";
        case ErrorCategory::Data: return "data";
        case ErrorCategory::Numeric: return "numeric";
    }
    return "numeric";
}

[[nodiscard]] int category_exit_code(ErrorCategory category) {
    switch (category) {
        case ErrorCategory::Usage: return 2;
        case ErrorCategory::Data: return 3;
        case ErrorCategory::Numeric: return 4;
    }
    return 4;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return dispatch(argc, argv);
    } catch (const EngineError& e) {
        std::cerr << "error: category=" << category_name(e.category()) << " code=" << e.code()
                  << " " << e.what() << "\n";
        return category_exit_code(e.category());
    } catch (const std::exception& e) {
        std::cerr << "error: category=numeric code=internal " << e.what() << "\n";
        return 4;
    }
}
