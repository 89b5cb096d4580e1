#include "bubblelab/adjust/adjust.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "bubblelab/core/csv.hpp"
#include "bubblelab/core/parallel.hpp"
#include "bubblelab/errors.hpp"

namespace bubblelab::adjust {

namespace {

/// Absolute end index of a frame.
long frame_end(const Frame& X) {
    return X.start_index() + static_cast<long>(X.n_rows()) - 1;
}

void require_covered(const Span& window, long start, long end, const std::string& what) {
    if (window.first < start || window.last > end) {
        throw data_error("alignment", what + " [" + std::to_string(window.first) + ", " +
                                          std::to_string(window.last) + "] not covered by [" +
                                          std::to_string(start) + ", " + std::to_string(end) +
                                          "]");
    }
}

}  // namespace

void AdjustmentPlan::require_valid() const {
    if (training.first > training.last || evaluation.first > evaluation.last) {
        throw usage_error("invalid_config", "training and evaluation spans must be ordered");
    }
    if (training.length() < 60) {
        throw usage_error("invalid_config", "training window has " +
                                                std::to_string(training.length()) +
                                                " observations; need at least 60");
    }
    if (training.last >= evaluation.first) {
        throw usage_error("invalid_config", "training must end before evaluation begins");
    }
    if (test_span && test_span->first > test_span->last) {
        throw usage_error("invalid_config", "test span must be ordered");
    }
}

DecompositionResult run_decomposition(const TimeSeries& p, const Frame& X,
                                      const AdjustmentPlan& plan) {
    plan.require_valid();
    p.require_valid(2);
    X.require_valid();

    // A lag of h makes the covariate row at absolute time t the original
    // X_{t-h}: shift the whole frame forward and leave everything else alone.
    Frame Xs = X;
    Xs.set_start_index(X.start_index() + static_cast<long>(plan.covariate_lag_h));

    require_covered(plan.training, p.start_index, p.end_index(), "training window of price");
    require_covered(plan.training, Xs.start_index(), frame_end(Xs),
                    "training window of covariates");

    const Span requested =
        plan.test_span.value_or(Span{plan.training.first, plan.evaluation.last});
    if (requested.first < p.start_index || requested.first < Xs.start_index()) {
        throw data_error("alignment",
                         "tested span begins at " + std::to_string(requested.first) +
                             " before the data does");
    }
    // Covariates that end early (publication lags) stop the run at the last
    // complete row; extrapolating the counterfactual would manufacture a gap.
    const long last_complete = std::min(p.end_index(), frame_end(Xs));
    const Span tested{requested.first, std::min(requested.last, last_complete)};
    if (tested.last < tested.first) {
        throw data_error("insufficient_sample", "no complete rows inside the tested span");
    }

    const TimeSeries p_train = p.slice(plan.training.first, plan.training.last);
    const Frame x_train = Xs.slice(plan.training.first, plan.training.last);

    DecompositionResult out;
    out.tested = tested;
    if (plan.estimator.kind == EstimatorSpec::Kind::Dols) {
        out.fit = coint::dols_fit(p_train, x_train, plan.estimator.q_leads_lags,
                                  plan.estimator.nw_bandwidth);
    } else {
        out.fit = coint::first_difference_fit(p_train, x_train);
    }

    const TimeSeries p_test = p.slice(tested.first, tested.last);
    const Frame x_test = Xs.slice(tested.first, tested.last);
    if (plan.estimator.kind == EstimatorSpec::Kind::Dols) {
        std::vector<double> f_hat(p_test.size());
        for (std::size_t t = 0; t < p_test.size(); ++t) {
            double fitted = out.fit.coefficients[0];
            for (std::size_t k = 0; k < x_test.n_cols(); ++k) {
                fitted += out.fit.coefficients[1 + k] * x_test.column_at(k)[t];
            }
            f_hat[t] = fitted;
        }
        out.counterfactual = TimeSeries(tested.first, std::move(f_hat), "f_hat");
    } else {
        out.counterfactual =
            coint::first_difference_counterfactual(out.fit, p_test, x_test, tested.first);
    }

    std::vector<double> gap(p_test.size());
    for (std::size_t t = 0; t < p_test.size(); ++t) {
        gap[t] = p_test.values[t] - out.counterfactual.values[t];
    }
    out.gap = TimeSeries(tested.first, std::move(gap), p.label + "_gap");

    out.unadjusted_test = psy::gsadf(p_test, plan.psy_config);
    out.adjusted_test = psy::gsadf(out.gap, plan.psy_config);

    if (plan.critical_values != nullptr) {
        const psy::CriticalValueTable& cv = *plan.critical_values;
        if (cv.T != tested.length()) {
            throw data_error("cv_length_mismatch",
                             "critical values simulated for T=" + std::to_string(cv.T) +
                                 " but the tested span has " + std::to_string(tested.length()) +
                                 " observations");
        }
        if (std::abs(cv.r0_fraction - plan.psy_config.r0_fraction) > 1e-12) {
            throw data_error("cv_key_mismatch",
                             "critical values use a different minimum-window fraction");
        }
    }
    return out;
}

TimeSeries adjust_series(const TimeSeries& y, SeriesKind kind, const TimeSeries& delta_hat,
                         const TimeSeries& pv_hat) {
    y.require_valid();
    delta_hat.require_valid();
    pv_hat.require_valid();
    if (delta_hat.start_index != y.start_index || delta_hat.size() != y.size() ||
        pv_hat.start_index != y.start_index || pv_hat.size() != y.size()) {
        throw data_error("alignment",
                         "series, delta_hat and pv_hat must share start index and length");
    }

    std::vector<double> adj(y.size());
    double running = 0.0;
    for (std::size_t t = 0; t < y.size(); ++t) {
        if (kind == SeriesKind::LogPrice) running += delta_hat.values[t];
        adj[t] = y.values[t] - pv_hat.values[t] - (kind == SeriesKind::LogPrice ? running : 0.0);
    }
    return TimeSeries(y.start_index, std::move(adj), y.label + "_adj");
}

std::vector<LeaveOneOutRow> leave_one_out(const TimeSeries& p, const Frame& X,
                                          const AdjustmentPlan& plan, unsigned n_workers) {
    if (X.n_cols() < 2) {
        throw usage_error("invalid_config",
                          "leave-one-out needs at least two covariates; dropping the only "
                          "column would leave an empty design");
    }
    std::vector<LeaveOneOutRow> rows(X.n_cols());
    parallel_for(X.n_cols(), n_workers, [&](std::size_t k) {
        const std::string name = X.name_at(k);
        const Frame dropped = X.without_column(name);
        rows[k] = LeaveOneOutRow{name, run_decomposition(p, dropped, plan).adjusted_test};
    });
    return rows;
}

std::vector<TrainingSweepRow> sweep_training_windows(const TimeSeries& p, const Frame& X,
                                                     const AdjustmentPlan& plan,
                                                     const std::vector<long>& end_dates,
                                                     unsigned n_workers) {
    if (end_dates.empty()) {
        throw usage_error("invalid_config", "training sweep needs at least one end date");
    }
    std::vector<TrainingSweepRow> rows(end_dates.size());
    parallel_for(end_dates.size(), n_workers, [&](std::size_t i) {
        AdjustmentPlan window_plan = plan;
        window_plan.training.last = end_dates[i];
        const DecompositionResult r = run_decomposition(p, X, window_plan);
        rows[i] = TrainingSweepRow{end_dates[i], r.adjusted_test.gsadf, r.fit.names,
                                   r.fit.coefficients, r.fit.r_squared};
    });
    return rows;
}

psy::ExplosiveTestResult placebo_window(const TimeSeries& p, const Frame& X,
                                        const AdjustmentPlan& plan, Span placebo,
                                        const psy::CriticalValueTable* placebo_cvs) {
    AdjustmentPlan placebo_plan = plan;
    placebo_plan.test_span = placebo;
    placebo_plan.critical_values = placebo_cvs;
    return run_decomposition(p, X, placebo_plan).adjusted_test;
}

RobustnessRow robustness_row(std::string specification, const psy::ExplosiveTestResult& test,
                             const psy::CriticalValueTable& cvs) {
    const auto cv_at = [&](double level) {
        for (std::size_t i = 0; i < cvs.levels.size(); ++i) {
            if (std::abs(cvs.levels[i] - level) < 1e-9) return cvs.gsadf_cv[i];
        }
        throw data_error("unknown_level", "critical-value table has no level " +
                                              csv::format_double(level));
    };
    RobustnessRow row;
    row.specification = std::move(specification);
    row.gsadf = test.gsadf;
    row.cv_10 = cv_at(0.10);
    row.cv_5 = cv_at(0.05);
    row.cv_1 = cv_at(0.01);
    row.rej_10 = row.gsadf > row.cv_10;
    row.rej_5 = row.gsadf > row.cv_5;
    row.rej_1 = row.gsadf > row.cv_1;
    return row;
}

void write_robustness_csv(const std::string& path, const std::vector<RobustnessRow>& rows) {
    csv::Table table;
    table.header = {"specification", "GSADF", "CV10", "CV05", "CV01", "rej10", "rej05", "rej01"};
    for (const RobustnessRow& r : rows) {
        table.rows.push_back({r.specification, csv::format_double(r.gsadf),
                              csv::format_double(r.cv_10), csv::format_double(r.cv_5),
                              csv::format_double(r.cv_1), r.rej_10 ? "1" : "0",
                              r.rej_5 ? "1" : "0", r.rej_1 ? "1" : "0"});
    }
    csv::write_table(path, table);
}

}  // namespace bubblelab::adjust
