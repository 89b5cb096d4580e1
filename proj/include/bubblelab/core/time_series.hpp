#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace bubblelab {

/// A real-valued series on a contiguous integer time index. The index is a
/// plain integer (months in empirical use, periods in simulation); calendar
/// parsing happens only at the CLI boundary. Values are immutable by
/// convention once a series is handed to an operation.
struct TimeSeries {
    long start_index = 0;
    std::vector<double> values;
    std::string label = "y";

    TimeSeries() = default;
    TimeSeries(long start, std::vector<double> vals, std::string name = "y")
        : start_index(start), values(std::move(vals)), label(std::move(name)) {}

    [[nodiscard]] std::size_t size() const noexcept { return values.size(); }
    [[nodiscard]] bool empty() const noexcept { return values.empty(); }
    /// Index of the last observation (start_index + size - 1). Requires non-empty.
    [[nodiscard]] long end_index() const noexcept {
        return start_index + static_cast<long>(values.size()) - 1;
    }
    /// Value at absolute time index t (bounds-checked).
    [[nodiscard]] double at_time(long t) const;

    /// Throws a degenerate-input error unless the series is non-empty, at
    /// least `min_length` long, and every value is finite.
    void require_valid(std::size_t min_length = 1) const;

    /// Sub-series covering absolute time indices [first, last], inclusive.
    [[nodiscard]] TimeSeries slice(long first, long last) const;
};

/// Aligned multi-series frame: named equal-length columns sharing one
/// start_index. Column order is preserved (it is part of the CSV contract).
class Frame {
public:
    Frame() = default;
    explicit Frame(long start) : start_index_(start) {}

    [[nodiscard]] long start_index() const noexcept { return start_index_; }
    void set_start_index(long s) noexcept { start_index_ = s; }

    [[nodiscard]] std::size_t n_rows() const noexcept {
        return columns_.empty() ? 0 : columns_.front().second.size();
    }
    [[nodiscard]] std::size_t n_cols() const noexcept { return columns_.size(); }

    [[nodiscard]] const std::vector<std::string>& names() const;

    /// Adds a column; throws an alignment error if the length differs from
    /// existing columns or the name already exists.
    void add_column(const std::string& name, std::vector<double> values);

    [[nodiscard]] bool has_column(const std::string& name) const noexcept;
    [[nodiscard]] const std::vector<double>& column(const std::string& name) const;
    [[nodiscard]] const std::vector<double>& column_at(std::size_t i) const;
    [[nodiscard]] const std::string& name_at(std::size_t i) const;

    /// Extracts a column as a TimeSeries (same start_index, label = name).
    [[nodiscard]] TimeSeries series(const std::string& name) const;

    /// New frame with the named column removed.
    [[nodiscard]] Frame without_column(const std::string& name) const;

    /// Sub-frame covering absolute time indices [first, last], inclusive.
    [[nodiscard]] Frame slice(long first, long last) const;

    /// Throws unless all columns are non-empty, equal-length and finite.
    void require_valid() const;

private:
    long start_index_ = 0;
    std::vector<std::pair<std::string, std::vector<double>>> columns_;
    mutable std::vector<std::string> names_cache_;
};

}  // namespace bubblelab
