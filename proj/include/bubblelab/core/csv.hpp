#pragma once

#include <string>
#include <vector>

#include "bubblelab/core/time_series.hpp"

namespace bubblelab::csv {

/// Shortest exact decimal representation of a double (std::to_chars): emitted
/// CSVs round-trip bit-exactly and are locale-independent.
[[nodiscard]] std::string format_double(double x);

/// Strict double parse (std::from_chars over the full cell). Throws a data
/// error naming `context` on failure.
[[nodiscard]] double parse_double(const std::string& cell, const std::string& context);

/// Raw rectangular CSV: first row is the header. No quoting or escaping —
/// all engine artifacts are plain numeric/identifier cells.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

[[nodiscard]] Table read_table(const std::string& path);
void write_table(const std::string& path, const Table& table);

/// Series CSV: header "t,<label>", integer t plus one value column.
void write_series(const std::string& path, const TimeSeries& series);
[[nodiscard]] TimeSeries read_series(const std::string& path);

/// Frame CSV: header "t,<col1>,<col2>,...", integer t plus value columns.
void write_frame(const std::string& path, const Frame& frame);
[[nodiscard]] Frame read_frame(const std::string& path);

}  // namespace bubblelab::csv
