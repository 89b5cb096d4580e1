#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "bubblelab/coint/cointegration.hpp"
#include "bubblelab/core/time_series.hpp"
#include "bubblelab/psy/psy.hpp"

namespace bubblelab::adjust {

/// Inclusive window of absolute time indices.
struct Span {
    long first = 0;
    long last = 0;

    [[nodiscard]] std::size_t length() const {
        return static_cast<std::size_t>(last - first + 1);
    }
};

/// Which long-run estimator produces the counterfactual level path.
struct EstimatorSpec {
    enum class Kind { Dols, FirstDifference };
    Kind kind = Kind::Dols;
    std::size_t q_leads_lags = 2;   ///< DOLS only
    std::size_t nw_bandwidth = 4;   ///< DOLS only
};

/// Full recipe for one decomposition run: where to train, where to evaluate,
/// how to estimate the fundamental, and how to test the gap.
///
/// `covariate_lag_h > 0` makes every covariate enter as X_{t-h} — training
/// fit and counterfactual alike — so no contemporaneous information leaks.
///
/// The explosiveness test runs over `test_span` when set, and over training
/// plus evaluation combined otherwise. `critical_values` is optional and
/// validated, never chosen silently: when present its sample length must
/// equal the span actually tested and its minimum-window fraction must match
/// the test configuration (the augmentation lag may differ — the null
/// convention is the caller's choice).
struct AdjustmentPlan {
    Span training{};
    Span evaluation{};
    EstimatorSpec estimator{};
    std::size_t covariate_lag_h = 0;
    psy::PsyConfig psy_config{};
    const psy::CriticalValueTable* critical_values = nullptr;
    std::optional<Span> test_span;

    /// Ordering and minimum-training-length (60) checks.
    void require_valid() const;
};

/// One decomposition: counterfactual level path, price gap, the fit behind
/// them, and the side-by-side explosiveness tests.
struct DecompositionResult {
    TimeSeries counterfactual;             ///< fhat over the tested span
    TimeSeries gap;                        ///< p - fhat, same span (identity is exact)
    coint::CointFit fit;                   ///< training-period estimate
    psy::ExplosiveTestResult unadjusted_test;  ///< recursive test on p over the span
    psy::ExplosiveTestResult adjusted_test;    ///< recursive test on the gap
    Span tested{};                         ///< actual span after any tail clipping
};

/// Fits the estimator on the training window only, extends the fitted level
/// relation into a counterfactual over the tested span, forms the gap
/// p - fhat, and runs the recursive explosiveness test on both the raw series
/// and the gap over that same span.
///
/// When covariates end before the requested span does (publication lags),
/// the tested span stops at the last complete row rather than extrapolating.
/// A first-difference estimator anchors its integrated counterfactual at the
/// first tested observation.
[[nodiscard]] DecompositionResult run_decomposition(const TimeSeries& p, const Frame& X,
                                                    const AdjustmentPlan& plan);

/// What an oracle adjustment subtracts from a tested series.
enum class SeriesKind {
    PDRatio,   ///< subtract the discounted technology term only
    LogPrice,  ///< subtract the running sum of delta_hat plus the technology term
};

/// Removes a known (or estimated) technology contribution from a series:
/// PDRatio subtracts pv_hat_t; LogPrice subtracts cumsum(delta_hat)_t +
/// pv_hat_t, with the running sum starting at the first observation. Callers
/// whose convention starts the sum one period later pass a delta_hat whose
/// first value is zero. All three inputs must share start index and length.
[[nodiscard]] TimeSeries adjust_series(const TimeSeries& y, SeriesKind kind,
                                       const TimeSeries& delta_hat, const TimeSeries& pv_hat);

/// One leave-one-out re-run: which covariate was dropped and the adjusted
/// test that resulted.
struct LeaveOneOutRow {
    std::string dropped;
    psy::ExplosiveTestResult adjusted;
};

/// Re-runs the decomposition once per covariate with that column removed
/// (needs at least two columns — dropping the only covariate would leave an
/// empty design). Rows come back in column order; runs are independent and
/// parallelize across covariates.
[[nodiscard]] std::vector<LeaveOneOutRow> leave_one_out(const TimeSeries& p, const Frame& X,
                                                        const AdjustmentPlan& plan,
                                                        unsigned n_workers = 1);

/// One training-window stability row.
struct TrainingSweepRow {
    long training_end = 0;
    double gsadf = 0.0;                 ///< adjusted statistic for this window
    std::vector<std::string> names;     ///< level coefficient names
    std::vector<double> coefficients;   ///< level coefficients of this window's fit
    double r_squared = 0.0;
};

/// Re-runs the decomposition holding everything fixed except the training
/// end date. Every candidate must leave at least 60 training observations
/// and end before the evaluation window. The tested span does not move, so
/// one critical-value table covers every row.
[[nodiscard]] std::vector<TrainingSweepRow> sweep_training_windows(const TimeSeries& p,
                                                                   const Frame& X,
                                                                   const AdjustmentPlan& plan,
                                                                   const std::vector<long>& end_dates,
                                                                   unsigned n_workers = 1);

/// Applies the adjustment trained under `plan` but tests only the placebo
/// window. The placebo span needs its own critical-value table (its length
/// differs from the main run); pass one to have it validated, or nullptr to
/// skip table validation.
[[nodiscard]] psy::ExplosiveTestResult placebo_window(
    const TimeSeries& p, const Frame& X, const AdjustmentPlan& plan, Span placebo,
    const psy::CriticalValueTable* placebo_cvs = nullptr);

/// One row of the robustness table: a named specification's statistic
/// against the 10%/5%/1% simulated critical values.
struct RobustnessRow {
    std::string specification;
    double gsadf = 0.0;
    double cv_10 = 0.0;
    double cv_5 = 0.0;
    double cv_1 = 0.0;
    bool rej_10 = false;
    bool rej_5 = false;
    bool rej_1 = false;
};

/// Builds a row from a test result and a table holding levels 0.10, 0.05 and
/// 0.01 (missing levels raise an unknown-level error).
[[nodiscard]] RobustnessRow robustness_row(std::string specification,
                                           const psy::ExplosiveTestResult& test,
                                           const psy::CriticalValueTable& cvs);

/// Writes rows with header (specification,GSADF,CV10,CV05,CV01,rej10,rej05,rej01).
void write_robustness_csv(const std::string& path, const std::vector<RobustnessRow>& rows);

}  // namespace bubblelab::adjust
