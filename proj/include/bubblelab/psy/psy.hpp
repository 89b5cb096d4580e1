#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "bubblelab/core/time_series.hpp"

namespace bubblelab::psy {

/// Window policy for the recursive test. `min_window_obs` is derived as
/// ceil(r0_fraction * T) at run time, never stored.
struct PsyConfig {
    double r0_fraction = 0.0;  ///< minimum window as a fraction of the sample
    std::size_t lag_K = 1;     ///< augmentation lags in every window regression

    /// ceil(r0_fraction * T). Throws unless r0_fraction >= 0.01 and the
    /// resulting window admits the lag order (>= lag_K + 4).
    [[nodiscard]] std::size_t min_window_obs(std::size_t T) const;
};

/// r0 = 0.01 + 1.8/sqrt(T), capped at 0.9. Requires T >= 30.
[[nodiscard]] double default_r0(std::size_t T);

/// One flagged explosive episode: inclusive 0-based positions within the
/// tested series where the backward statistic stays above its critical value.
struct Episode {
    std::size_t start = 0;
    std::size_t end = 0;
};

/// Output of the recursive test on one series. `bsadf_sequence[i]` is
/// BSADF(r2) at r2 = first_r2 + i; the last entry sits at r2 = T-1. Windows
/// whose regression is singular are skipped inside the sup; an r2 whose every
/// admissible window failed holds a quiet NaN and is ignored by the sup and
/// by date stamping (this cannot happen for series with innovations).
struct ExplosiveTestResult {
    double gsadf = 0.0;  ///< max over the finite entries of bsadf_sequence
    std::size_t first_r2 = 0;
    std::vector<double> bsadf_sequence;
};

/// Simulated null quantiles for one (T, r0, K, n_reps, seed) key.
/// gsadf_cv[i] and bsadf_cv[i] belong to levels[i]; bsadf_cv[i][j] is the
/// per-r2 critical value at r2 = first_r2 + j from the same replications.
struct CriticalValueTable {
    std::size_t T = 0;
    double r0_fraction = 0.0;
    std::size_t lag_K = 0;
    std::size_t n_reps = 0;
    std::uint64_t master_seed = 0;
    std::vector<double> levels;
    std::vector<double> gsadf_cv;
    std::size_t first_r2 = 0;
    std::vector<std::vector<double>> bsadf_cv;
};

/// Statistic engine selector. Incremental maintains running window moments
/// (one rank-1 update per window extension, O(T^2) per series); Naive
/// refits every window by QR (O(T^3)) and exists as a cross-checking oracle,
/// reachable from the CLI behind a debug flag.
enum class Engine { Incremental, Naive };

/// Backward sup-ADF at a fixed window end: sup over admissible start
/// positions r1 <= r2 - min_window + 1 of the windowed ADF statistic.
/// Positions are 0-based offsets into `y`. Throws only if every admissible
/// window fails.
[[nodiscard]] double bsadf(const TimeSeries& y, std::size_t r2, const PsyConfig& cfg,
                           Engine engine = Engine::Incremental);

/// Full recursive sweep: BSADF(r2) for every r2 from min_window-1 to T-1 and
/// the generalized statistic gsadf = sup over r2.
[[nodiscard]] ExplosiveTestResult gsadf(const TimeSeries& y, const PsyConfig& cfg,
                                        Engine engine = Engine::Incremental);

/// Simulates `n_reps` driftless Gaussian random walks under the null
/// (replication m draws RngStream(seed, m) and cumulates T standard
/// normals), runs the full recursive sweep on each, and returns empirical
/// quantiles: per-level scalar GSADF critical values and per-r2 BSADF
/// critical-value sequences. Level a uses the (1-a) type-7 quantile.
/// Deterministic for a given seed on any worker count. n_reps >= 200.
[[nodiscard]] CriticalValueTable simulate_critical_values(std::size_t T, const PsyConfig& cfg,
                                                          const std::vector<double>& levels,
                                                          std::size_t n_reps, std::uint64_t seed,
                                                          unsigned n_workers = 1);

/// Maximal runs of consecutive r2 with BSADF(r2) above the per-r2 critical
/// value at `level`. Episode bounds are 0-based series positions. Throws an
/// alignment error when the result and table grids differ, and an
/// unknown-level error when `level` is not in the table.
[[nodiscard]] std::vector<Episode> date_stamp(const ExplosiveTestResult& result,
                                              const CriticalValueTable& cvs, double level);

/// Cache file stem for a critical-value key, e.g.
/// "cv_T372_r0_0.10332578219450297_K1_n2000_s42". The r0 fragment is the
/// shortest exact decimal so distinct keys never collide.
[[nodiscard]] std::string cv_cache_stem(std::size_t T, double r0_fraction, std::size_t lag_K,
                                        std::size_t n_reps, std::uint64_t seed);

/// Writes the scalar table (columns: level,gsadf_cv) and the per-r2 table
/// (columns: r2_index,cv_10,cv_05,... — one per level).
void write_critical_values(const CriticalValueTable& table, const std::string& scalar_path,
                           const std::string& sequence_path);

/// Reads both CSVs back. T and first_r2 are recovered from the r2 grid; the
/// remaining key fields are stamped from the arguments (the cache filename
/// carries them). Throws a data error if the files are inconsistent.
[[nodiscard]] CriticalValueTable read_critical_values(const std::string& scalar_path,
                                                      const std::string& sequence_path,
                                                      double r0_fraction, std::size_t lag_K,
                                                      std::size_t n_reps, std::uint64_t seed);

}  // namespace bubblelab::psy
