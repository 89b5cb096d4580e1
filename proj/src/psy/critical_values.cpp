#include <algorithm>
#include <cmath>
#include <string>

#include "bubblelab/core/csv.hpp"
#include "bubblelab/core/parallel.hpp"
#include "bubblelab/core/rng.hpp"
#include "bubblelab/core/stats.hpp"
#include "bubblelab/errors.hpp"
#include "bubblelab/psy/psy.hpp"

namespace bubblelab::psy {

namespace {

void validate_levels(const std::vector<double>& levels) {
    if (levels.empty()) throw usage_error("invalid_config", "need at least one critical-value level");
    for (double a : levels) {
        if (!(a > 0.0 && a < 1.0)) {
            throw usage_error("invalid_config", "level " + std::to_string(a) + " outside (0,1)");
        }
    }
}

/// Column name for a level: two-digit percents for the conventional levels
/// ("cv_10", "cv_05", "cv_01"), shortest exact decimal otherwise.
std::string level_column_name(double level) {
    const double pct = level * 100.0;
    const long rounded = std::lround(pct);
    if (rounded >= 1 && rounded <= 99 && std::abs(pct - static_cast<double>(rounded)) < 1e-9) {
        const std::string digits = std::to_string(rounded);
        return digits.size() == 1 ? "cv_0" + digits : "cv_" + digits;
    }
    return "cv_" + csv::format_double(level);
}

double level_from_column_name(const std::string& name, const std::string& path) {
    if (name.size() < 4 || name.rfind("cv_", 0) != 0) {
        throw data_error("schema", "unexpected column '" + name + "' in '" + path + "'");
    }
    const std::string tail = name.substr(3);
    if (tail.size() == 2 && std::isdigit(static_cast<unsigned char>(tail[0])) &&
        std::isdigit(static_cast<unsigned char>(tail[1]))) {
        return static_cast<double>(std::stoi(tail)) / 100.0;
    }
    return csv::parse_double(tail, "column name '" + name + "' of '" + path + "'");
}

}  // namespace

CriticalValueTable simulate_critical_values(std::size_t T, const PsyConfig& cfg,
                                            const std::vector<double>& levels, std::size_t n_reps,
                                            std::uint64_t seed, unsigned n_workers) {
    validate_levels(levels);
    if (n_reps < 200) {
        throw usage_error("too_few_replications",
                          "critical values need n_reps >= 200; got " + std::to_string(n_reps));
    }
    const std::size_t minw = cfg.min_window_obs(T);
    const std::size_t seq_len = T - minw + 1;

    std::vector<double> gsadf_draws(n_reps);
    std::vector<std::vector<double>> sequences(n_reps);

    parallel_for(n_reps, n_workers, [&](std::size_t m) {
        RngStream rng(seed, m);
        std::vector<double> path(T);
        double level_acc = 0.0;
        for (auto& x : path) {
            level_acc += rng.normal();
            x = level_acc;
        }
        const ExplosiveTestResult r = gsadf(TimeSeries(0, std::move(path), "null"), cfg);
        gsadf_draws[m] = r.gsadf;
        sequences[m] = std::move(r.bsadf_sequence);
    });

    CriticalValueTable table;
    table.T = T;
    table.r0_fraction = cfg.r0_fraction;
    table.lag_K = cfg.lag_K;
    table.n_reps = n_reps;
    table.master_seed = seed;
    table.levels = levels;
    table.first_r2 = minw - 1;

    for (double a : levels) table.gsadf_cv.push_back(quantile_type7(gsadf_draws, 1.0 - a));

    std::vector<double> column(n_reps);
    table.bsadf_cv.assign(levels.size(), std::vector<double>(seq_len));
    for (std::size_t j = 0; j < seq_len; ++j) {
        for (std::size_t m = 0; m < n_reps; ++m) {
            const double x = sequences[m][j];
            if (!std::isfinite(x)) {
                throw numeric_error("window_degenerate",
                                    "null replication produced a degenerate backward statistic");
            }
            column[m] = x;
        }
        for (std::size_t i = 0; i < levels.size(); ++i) {
            table.bsadf_cv[i][j] = quantile_type7(column, 1.0 - levels[i]);
        }
    }
    return table;
}

std::vector<Episode> date_stamp(const ExplosiveTestResult& result, const CriticalValueTable& cvs,
                                double level) {
    std::size_t level_idx = cvs.levels.size();
    for (std::size_t i = 0; i < cvs.levels.size(); ++i) {
        if (std::abs(cvs.levels[i] - level) < 1e-12) {
            level_idx = i;
            break;
        }
    }
    if (level_idx == cvs.levels.size()) {
        throw usage_error("unknown_level",
                          "level " + std::to_string(level) + " not present in the table");
    }
    const std::vector<double>& cv = cvs.bsadf_cv[level_idx];
    if (cvs.first_r2 != result.first_r2 || cv.size() != result.bsadf_sequence.size()) {
        throw data_error("alignment", "statistic sequence and critical-value sequence span "
                                      "different r2 grids");
    }

    std::vector<Episode> episodes;
    bool open = false;
    for (std::size_t j = 0; j < cv.size(); ++j) {
        const double stat = result.bsadf_sequence[j];
        const bool above = std::isfinite(stat) && stat > cv[j];
        if (above && !open) {
            episodes.push_back({result.first_r2 + j, result.first_r2 + j});
            open = true;
        } else if (above) {
            episodes.back().end = result.first_r2 + j;
        } else {
            open = false;
        }
    }
    return episodes;
}

std::string cv_cache_stem(std::size_t T, double r0_fraction, std::size_t lag_K, std::size_t n_reps,
                          std::uint64_t seed) {
    return "cv_T" + std::to_string(T) + "_r0_" + csv::format_double(r0_fraction) + "_K" +
           std::to_string(lag_K) + "_n" + std::to_string(n_reps) + "_s" + std::to_string(seed);
}

void write_critical_values(const CriticalValueTable& table, const std::string& scalar_path,
                           const std::string& sequence_path) {
    csv::Table scalar;
    scalar.header = {"level", "gsadf_cv"};
    for (std::size_t i = 0; i < table.levels.size(); ++i) {
        scalar.rows.push_back(
            {csv::format_double(table.levels[i]), csv::format_double(table.gsadf_cv[i])});
    }
    csv::write_table(scalar_path, scalar);

    csv::Table seq;
    seq.header = {"r2_index"};
    for (double a : table.levels) seq.header.push_back(level_column_name(a));
    const std::size_t seq_len = table.bsadf_cv.empty() ? 0 : table.bsadf_cv.front().size();
    for (std::size_t j = 0; j < seq_len; ++j) {
        std::vector<std::string> row;
        row.push_back(std::to_string(table.first_r2 + j));
        for (std::size_t i = 0; i < table.levels.size(); ++i) {
            row.push_back(csv::format_double(table.bsadf_cv[i][j]));
        }
        seq.rows.push_back(std::move(row));
    }
    csv::write_table(sequence_path, seq);
}

CriticalValueTable read_critical_values(const std::string& scalar_path,
                                        const std::string& sequence_path, double r0_fraction,
                                        std::size_t lag_K, std::size_t n_reps,
                                        std::uint64_t seed) {
    const csv::Table scalar = csv::read_table(scalar_path);
    if (scalar.header != std::vector<std::string>{"level", "gsadf_cv"}) {
        throw data_error("schema", "'" + scalar_path + "' must have header 'level,gsadf_cv'");
    }
    CriticalValueTable table;
    table.r0_fraction = r0_fraction;
    table.lag_K = lag_K;
    table.n_reps = n_reps;
    table.master_seed = seed;
    for (std::size_t r = 0; r < scalar.rows.size(); ++r) {
        const std::string where = "row " + std::to_string(r + 1) + " of '" + scalar_path + "'";
        table.levels.push_back(csv::parse_double(scalar.rows[r][0], where));
        table.gsadf_cv.push_back(csv::parse_double(scalar.rows[r][1], where));
    }

    const csv::Table seq = csv::read_table(sequence_path);
    if (seq.header.size() != table.levels.size() + 1 || seq.header[0] != "r2_index") {
        throw data_error("schema", "'" + sequence_path +
                                       "' must have header 'r2_index' plus one column per level");
    }
    for (std::size_t i = 0; i < table.levels.size(); ++i) {
        const double lv = level_from_column_name(seq.header[i + 1], sequence_path);
        if (std::abs(lv - table.levels[i]) > 1e-12) {
            throw data_error("schema", "level order differs between '" + scalar_path + "' and '" +
                                           sequence_path + "'");
        }
    }
    if (seq.rows.empty()) throw data_error("degenerate_input", "'" + sequence_path + "' is empty");

    table.bsadf_cv.assign(table.levels.size(), {});
    long prev = 0;
    for (std::size_t r = 0; r < seq.rows.size(); ++r) {
        const std::string where = "row " + std::to_string(r + 1) + " of '" + sequence_path + "'";
        const long r2 = static_cast<long>(csv::parse_double(seq.rows[r][0], where));
        if (r == 0) {
            table.first_r2 = static_cast<std::size_t>(r2);
        } else if (r2 != prev + 1) {
            throw data_error("parse", "non-contiguous r2_index at " + where);
        }
        prev = r2;
        for (std::size_t i = 0; i < table.levels.size(); ++i) {
            table.bsadf_cv[i].push_back(csv::parse_double(seq.rows[r][i + 1], where));
        }
    }
    table.T = static_cast<std::size_t>(prev) + 1;

    PsyConfig cfg;
    cfg.r0_fraction = r0_fraction;
    cfg.lag_K = lag_K;
    if (cfg.min_window_obs(table.T) - 1 != table.first_r2) {
        throw data_error("schema", "r2 grid of '" + sequence_path +
                                       "' is inconsistent with r0 = " + csv::format_double(r0_fraction));
    }
    return table;
}

}  // namespace bubblelab::psy
