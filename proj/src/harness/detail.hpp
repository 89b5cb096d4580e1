#pragma once

/// Internal helpers shared by the experiment runner and the overlap runner.
/// Not installed; include only from harness translation units.

#include <optional>
#include <string>

#include "bubblelab/harness/harness.hpp"

namespace bubblelab::harness::detail {

/// Salt XOR-ed into the experiment seed before simulating the internal null
/// critical-value table, so the table's replication streams never collide
/// with the experiment's data streams under the same master seed.
inline constexpr std::uint64_t kNullTableSeedSalt = 0x9E3779B97F4A7C15ULL;

/// Returns the table the run should score against: the spec-supplied one
/// (validated against T, the default minimum-window fraction for T, and the
/// requested level) or a fresh simulation stored in `storage`.
[[nodiscard]] const psy::CriticalValueTable& resolve_null_table(
    const ExperimentSpec& spec, std::optional<psy::CriticalValueTable>& storage,
    unsigned n_workers);

/// Scalar GSADF critical value at `level`; throws data_error("unknown_level")
/// when the table does not carry it.
[[nodiscard]] double gsadf_cv_at(const psy::CriticalValueTable& table, double level);

/// y_t - intercept - slope * t, with t counted from the first observation.
[[nodiscard]] TimeSeries subtract_deterministic_trend(const TimeSeries& y, double intercept,
                                                      double slope, std::string label);

}  // namespace bubblelab::harness::detail
