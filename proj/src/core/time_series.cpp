#include "bubblelab/core/time_series.hpp"

#include <algorithm>
#include <cmath>

#include "bubblelab/errors.hpp"

namespace bubblelab {

double TimeSeries::at_time(long t) const {
    const long off = t - start_index;
    if (off < 0 || off >= static_cast<long>(values.size())) {
        throw data_error("index_out_of_range",
                         "time index " + std::to_string(t) + " outside series '" + label + "' [" +
                             std::to_string(start_index) + ", " + std::to_string(end_index()) + "]");
    }
    return values[static_cast<std::size_t>(off)];
}

void TimeSeries::require_valid(std::size_t min_length) const {
    if (values.size() < std::max<std::size_t>(min_length, 1)) {
        throw data_error("degenerate_input", "series '" + label + "' has " +
                                                 std::to_string(values.size()) +
                                                 " observations; need at least " +
                                                 std::to_string(std::max<std::size_t>(min_length, 1)));
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i])) {
            throw data_error("non_finite_value", "series '" + label + "' has a non-finite value at t=" +
                                                     std::to_string(start_index + static_cast<long>(i)));
        }
    }
}

TimeSeries TimeSeries::slice(long first, long last) const {
    if (first > last || first < start_index || last > end_index()) {
        throw data_error("index_out_of_range",
                         "slice [" + std::to_string(first) + ", " + std::to_string(last) +
                             "] outside series '" + label + "'");
    }
    const auto a = static_cast<std::size_t>(first - start_index);
    const auto b = static_cast<std::size_t>(last - start_index);
    return TimeSeries(first, std::vector<double>(values.begin() + static_cast<long>(a),
                                                 values.begin() + static_cast<long>(b) + 1),
                      label);
}

const std::vector<std::string>& Frame::names() const {
    names_cache_.clear();
    names_cache_.reserve(columns_.size());
    for (const auto& [name, _] : columns_) names_cache_.push_back(name);
    return names_cache_;
}

void Frame::add_column(const std::string& name, std::vector<double> values) {
    if (has_column(name)) {
        throw data_error("duplicate_column", "column '" + name + "' already exists");
    }
    if (!columns_.empty() && values.size() != n_rows()) {
        throw data_error("alignment", "column '" + name + "' has " + std::to_string(values.size()) +
                                          " rows; frame has " + std::to_string(n_rows()));
    }
    columns_.emplace_back(name, std::move(values));
}

bool Frame::has_column(const std::string& name) const noexcept {
    return std::any_of(columns_.begin(), columns_.end(),
                       [&](const auto& c) { return c.first == name; });
}

const std::vector<double>& Frame::column(const std::string& name) const {
    for (const auto& [n, v] : columns_) {
        if (n == name) return v;
    }
    throw data_error("unknown_column", "no column named '" + name + "'");
}

const std::vector<double>& Frame::column_at(std::size_t i) const {
    if (i >= columns_.size()) throw data_error("unknown_column", "column index out of range");
    return columns_[i].second;
}

const std::string& Frame::name_at(std::size_t i) const {
    if (i >= columns_.size()) throw data_error("unknown_column", "column index out of range");
    return columns_[i].first;
}

TimeSeries Frame::series(const std::string& name) const {
    return TimeSeries(start_index_, column(name), name);
}

Frame Frame::without_column(const std::string& name) const {
    if (!has_column(name)) throw data_error("unknown_column", "no column named '" + name + "'");
    Frame out(start_index_);
    for (const auto& [n, v] : columns_) {
        if (n != name) out.add_column(n, v);
    }
    return out;
}

Frame Frame::slice(long first, long last) const {
    const long end = start_index_ + static_cast<long>(n_rows()) - 1;
    if (columns_.empty() || first > last || first < start_index_ || last > end) {
        throw data_error("index_out_of_range", "frame slice [" + std::to_string(first) + ", " +
                                                   std::to_string(last) + "] outside [" +
                                                   std::to_string(start_index_) + ", " +
                                                   std::to_string(end) + "]");
    }
    Frame out(first);
    const auto a = static_cast<long>(first - start_index_);
    const auto b = static_cast<long>(last - start_index_);
    for (const auto& [n, v] : columns_) {
        out.add_column(n, std::vector<double>(v.begin() + a, v.begin() + b + 1));
    }
    return out;
}

void Frame::require_valid() const {
    if (columns_.empty()) throw data_error("degenerate_input", "frame has no columns");
    for (const auto& [name, v] : columns_) {
        TimeSeries(start_index_, v, name).require_valid();
        if (v.size() != n_rows()) {
            throw data_error("alignment", "column '" + name + "' misaligned");
        }
    }
}

}  // namespace bubblelab
