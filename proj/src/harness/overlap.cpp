#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "bubblelab/adjust/adjust.hpp"
#include "bubblelab/core/csv.hpp"
#include "bubblelab/core/rng.hpp"
#include "bubblelab/errors.hpp"
#include "bubblelab/harness/harness.hpp"
#include "detail.hpp"

namespace bubblelab::harness {

OverlapResult run_overlap(const ExperimentSpec& spec, unsigned n_workers) {
    spec.require_valid();
    if (spec.id != ExperimentId::Overlap) {
        throw usage_error("invalid_config", "run_overlap needs the overlap design");
    }
    std::optional<psy::CriticalValueTable> storage;
    const psy::CriticalValueTable& table = detail::resolve_null_table(spec, storage, n_workers);

    RngStream stream(spec.seed, 0);
    const dgp::SimulatedEconomy econ = dgp::simulate_economy(
        spec.profile, spec.model, spec.T, spec.sigma_eps, spec.bubble, spec.obs_noise_sd, stream);

    OverlapResult result;
    result.raw_series = detail::subtract_deterministic_trend(
        econ.price, spec.model.level_constant(), spec.model.c, "p_detrended");
    result.adjusted_series = adjust::adjust_series(result.raw_series, adjust::SeriesKind::LogPrice,
                                                   econ.delta, econ.pv_term);

    const psy::PsyConfig cfg{psy::default_r0(spec.T), spec.lag_K};
    result.raw = psy::gsadf(result.raw_series, cfg);
    result.adjusted = psy::gsadf(result.adjusted_series, cfg);
    result.raw_episodes = psy::date_stamp(result.raw, table, spec.level);
    result.adjusted_episodes = psy::date_stamp(result.adjusted, table, spec.level);
    if (!result.raw_episodes.empty()) {
        result.first_detection_raw = static_cast<long>(result.raw_episodes.front().start);
    }
    if (!result.adjusted_episodes.empty()) {
        result.first_detection_adjusted = static_cast<long>(result.adjusted_episodes.front().start);
    }
    result.cv_level = spec.level;
    return result;
}

void write_overlap_csv(const std::string& path, const OverlapResult& result,
                       const psy::CriticalValueTable& cvs) {
    std::size_t level_index = cvs.levels.size();
    for (std::size_t i = 0; i < cvs.levels.size(); ++i) {
        if (cvs.levels[i] == result.cv_level) {
            level_index = i;
            break;
        }
    }
    if (level_index == cvs.levels.size()) {
        throw data_error("unknown_level",
                         "critical-value table does not carry the date-stamping level");
    }
    const std::vector<double>& cv_sequence = cvs.bsadf_cv[level_index];
    const std::size_t n = result.raw.bsadf_sequence.size();
    if (result.adjusted.bsadf_sequence.size() != n || cv_sequence.size() != n ||
        cvs.first_r2 != result.raw.first_r2 || result.adjusted.first_r2 != result.raw.first_r2) {
        throw data_error("alignment",
                         "statistic and critical-value sequences do not share a grid");
    }
    csv::Table out;
    out.header = {"t", "raw_bsadf", "adjusted_bsadf", "cv", "raw_flag", "adjusted_flag"};
    out.rows.reserve(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double raw = result.raw.bsadf_sequence[j];
        const double adjusted = result.adjusted.bsadf_sequence[j];
        const double cv = cv_sequence[j];
        out.rows.push_back({std::to_string(result.raw.first_r2 + j), csv::format_double(raw),
                            csv::format_double(adjusted), csv::format_double(cv),
                            raw > cv ? "1" : "0", adjusted > cv ? "1" : "0"});
    }
    csv::write_table(path, out);
}

}  // namespace bubblelab::harness
