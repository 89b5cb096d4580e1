#pragma once

/// Monte-Carlo experiment runner for the explosive-root test under
/// technology-augmented fundamentals. Six pre-registered designs measure how
/// often the recursive test rejects on simulated economies, with and without
/// the oracle technology adjustment:
///
///   A          detrended log price vs. shock peak (triangular profile)
///   B          log price-dividend ratio with AR(1) noise vs. shock peak
///   C          detrended log price vs. discount factor (fixed peak)
///   Shapes     design A repeated across four hump-shape families
///   Stochastic uncertain cumulative impact with Bayesian learning, swept
///              over the prior coefficient of variation under common random
///              numbers
///   Overlap    a single path where a technology window and a genuine
///              speculative bubble overlap; reports first detection dates
///
/// Every gridded design tests against one null critical-value table simulated
/// for the experiment's sample length (driftless random walks, lag 0), while
/// the data-side regressions use the spec's own lag.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bubblelab/core/time_series.hpp"
#include "bubblelab/dgp/economy.hpp"
#include "bubblelab/dgp/profile.hpp"
#include "bubblelab/dgp/stochastic.hpp"
#include "bubblelab/psy/psy.hpp"

namespace bubblelab::harness {

/// Experiment design selector (the letters are the designs' registry names,
/// also used by the command-line front end).
enum class ExperimentId { A, B, C, Shapes, Stochastic, Overlap };

/// Series construction for the stochastic-uncertainty design.
enum class StochasticPanel {
    PdRatio,            ///< y_t = C + filtered present value + AR(1) noise
    DetrendedLogPrice,  ///< log price on observed signals, OLS-detrended
};

/// One experiment's full parameterization. The factories below produce the
/// six pre-registered designs; fields stay public so callers can rescale a
/// design (smaller M, coarser grid) without changing its meaning.
struct ExperimentSpec {
    ExperimentId id = ExperimentId::A;

    /// Grid values: shock peaks (A, B, Shapes), discount factors (C), or
    /// prior coefficients of variation (Stochastic). Unused by Overlap.
    std::vector<double> grid;

    /// Shape families crossed with `grid` (Shapes only).
    std::vector<dgp::ShockShape> shapes;

    StochasticPanel panel = StochasticPanel::PdRatio;  ///< Stochastic only

    std::size_t M = 200;   ///< replications per grid point, >= 50
    std::size_t T = 300;   ///< sample length
    dgp::PresentValueModel model = dgp::PresentValueModel::baseline();
    dgp::TechShockProfile profile;  ///< base profile; grid overrides the peak
    double sigma_eps = 0.10;        ///< dividend innovation sd
    double level = 0.05;            ///< nominal test size
    std::size_t lag_K = 1;          ///< augmentation lag for data-side tests
    std::uint64_t seed = 0;         ///< master seed for every stream

    /// Replications for the internally simulated critical-value table.
    std::size_t cv_reps = 500;

    /// Optional pre-simulated table (not owned). Must match the spec's T,
    /// the default minimum-window fraction for T, and contain `level`.
    const psy::CriticalValueTable* critical_values = nullptr;

    /// Stationary AR(1) noise on the price-dividend ratio (B and the
    /// Stochastic PdRatio panel).
    dgp::Ar1NoiseSpec pd_noise{0.95, 0.0};

    double sigma_xi = 0.005;  ///< signal noise sd (Stochastic only)

    std::optional<dgp::BubbleSpec> bubble;  ///< Overlap only
    double obs_noise_sd = 0.0;              ///< Overlap only

    /// Pre-registered designs at their documented calibrations.
    [[nodiscard]] static ExperimentSpec experiment_a(std::uint64_t seed, std::size_t M = 200);
    [[nodiscard]] static ExperimentSpec experiment_b(std::uint64_t seed, std::size_t M = 200);
    [[nodiscard]] static ExperimentSpec experiment_c(std::uint64_t seed, std::size_t M = 200);
    [[nodiscard]] static ExperimentSpec shape_robustness(std::uint64_t seed,
                                                         std::size_t M = 200);
    [[nodiscard]] static ExperimentSpec stochastic_grid(StochasticPanel panel,
                                                        std::uint64_t seed,
                                                        std::size_t M = 500);
    [[nodiscard]] static ExperimentSpec overlap(std::uint64_t seed);

    /// Throws usage_error("invalid_config") on M < 50, an empty grid (gridded
    /// designs), a bad level, or invalid embedded model/profile parameters.
    void require_valid() const;
};

/// Rejection rates at one grid point.
struct RejectionRow {
    std::string label;        ///< e.g. "delta_max=0.08" or "gaussian delta_max=0.08"
    double grid_value = 0.0;  ///< numeric grid coordinate
    double unadjusted_rate = 0.0;
    double adjusted_rate = 0.0;
    std::size_t n_reps = 0;
};

/// One experiment's result table. `spec` echoes the run's parameterization
/// with the critical-value pointer cleared (the table does not own it);
/// `cv_threshold` is the scalar critical value every replication was scored
/// against.
struct RejectionTable {
    ExperimentSpec spec;
    double r0_fraction = 0.0;
    double cv_threshold = 0.0;
    std::vector<RejectionRow> rows;
};

/// Runs design A, B, C, or Shapes. Replication m at grid index g draws
/// RngStream(seed, g * M + m); the null table is simulated once per call
/// (or validated, when the spec supplies one). Identical output for every
/// worker count.
[[nodiscard]] RejectionTable run_experiment(const ExperimentSpec& spec,
                                            unsigned n_workers = 1);

/// Runs the Stochastic design under common random numbers: replication m
/// replays RngStream(seed, m) at every grid value, so differences across the
/// prior-uncertainty grid come from the prior alone.
[[nodiscard]] RejectionTable run_stochastic_grid(const ExperimentSpec& spec,
                                                 unsigned n_workers = 1);

/// One overlap path and both date-stamped tests.
struct OverlapResult {
    TimeSeries raw_series;       ///< detrended log price
    TimeSeries adjusted_series;  ///< after removing the technology terms
    psy::ExplosiveTestResult raw;
    psy::ExplosiveTestResult adjusted;
    std::vector<psy::Episode> raw_episodes;
    std::vector<psy::Episode> adjusted_episodes;
    std::optional<long> first_detection_raw;       ///< start of first episode
    std::optional<long> first_detection_adjusted;  ///< start of first episode
    double cv_level = 0.0;  ///< date-stamping level used
};

/// Runs the Overlap design on the single path RngStream(spec.seed, 0):
/// simulates the composite economy (hump-shaped shock + explosive bubble +
/// observation noise), tests the detrended log price raw and adjusted, and
/// date-stamps both against the per-observation critical-value sequence at
/// spec.level.
[[nodiscard]] OverlapResult run_overlap(const ExperimentSpec& spec,
                                        unsigned n_workers = 1);

/// Writes rows as (grid_value, label, unadjusted, adjusted, n_reps) — the
/// generic plot-data layout.
void write_rejection_csv(const std::string& path, const RejectionTable& table);

/// Pivots a Shapes table to one row per grid value with one column per shape
/// family: (delta_max, triangular, gaussian, beta, gamma_like). Requires every
/// (shape, grid value) pair to be present.
void write_shapes_csv(const std::string& path, const RejectionTable& table);

/// Writes a Stochastic table as (cv, unadjusted, delta_pp, adjusted) where
/// delta_pp is the percentage-point change from the first grid row.
void write_stochastic_csv(const std::string& path, const RejectionTable& table);

/// Writes the overlap timeline: one row per tested observation with both
/// statistics, the critical value at the date-stamping level, and 0/1
/// episode flags. Columns: t, raw_bsadf, adjusted_bsadf, cv, raw_flag,
/// adjusted_flag.
void write_overlap_csv(const std::string& path, const OverlapResult& result,
                       const psy::CriticalValueTable& cvs);

}  // namespace bubblelab::harness
