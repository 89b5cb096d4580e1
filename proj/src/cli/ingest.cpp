#include "bubblelab/cli/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "bubblelab/core/csv.hpp"
#include "bubblelab/errors.hpp"

namespace bubblelab::cli {

namespace {

struct YearMonth {
    int year = 0;
    int month = 0;  // 1..12
};

[[nodiscard]] bool parse_year_month(const std::string& cell, YearMonth& out) {
    if (cell.size() != 7 || cell[4] != '-') return false;
    for (const std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u}) {
        if (std::isdigit(static_cast<unsigned char>(cell[i])) == 0) return false;
    }
    out.year = (cell[0] - '0') * 1000 + (cell[1] - '0') * 100 + (cell[2] - '0') * 10 + (cell[3] - '0');
    out.month = (cell[5] - '0') * 10 + (cell[6] - '0');
    return out.month >= 1 && out.month <= 12;
}

[[nodiscard]] long month_count(const YearMonth& ym) { return 12L * ym.year + ym.month - 1; }

[[nodiscard]] long parse_row_index(const std::string& cell, const std::string& context) {
    long value = 0;
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end) {
        throw data_error("parse", "cannot parse integer '" + cell + "' at " + context);
    }
    return value;
}

/// Second derivatives of the natural cubic spline through equally spaced
/// knots (spacing h): M[0] = M[n-1] = 0 and the interior values solve the
/// tridiagonal system M[i-1] + 4 M[i] + M[i+1] = 6 (y[i+1] - 2 y[i] + y[i-1]) / h^2.
[[nodiscard]] std::vector<double> natural_second_derivatives(const std::vector<double>& y,
                                                             double h) {
    const std::size_t n = y.size();
    std::vector<double> m(n, 0.0);
    if (n < 3) return m;
    const std::size_t k = n - 2;
    std::vector<double> diag(k, 4.0);
    std::vector<double> rhs(k);
    for (std::size_t e = 0; e < k; ++e) {
        rhs[e] = 6.0 * (y[e + 2] - 2.0 * y[e + 1] + y[e]) / (h * h);
    }
    for (std::size_t e = 1; e < k; ++e) {
        const double w = 1.0 / diag[e - 1];
        diag[e] -= w;
        rhs[e] -= w * rhs[e - 1];
    }
    for (std::size_t e = k; e-- > 0;) {
        m[e + 1] = (rhs[e] - m[e + 2]) / diag[e];
    }
    return m;
}

}  // namespace

std::string DateMapping::date_at(long index) const {
    const long months = 12L * base_year + (base_month - 1) + index * month_step;
    const long year = months / 12;
    const long month = months % 12 + 1;
    char buffer[16];
    std::snprintf(buffer, sizeof(buffer), "%04ld-%02ld", year, month);
    return buffer;
}

Frame ingest_frame(const std::string& path, std::optional<DateMapping>* mapping, int month_step) {
    if (mapping != nullptr) mapping->reset();
    if (month_step < 1) throw usage_error("invalid_config", "month_step must be positive");
    const csv::Table table = csv::read_table(path);
    if (table.header.size() < 2) {
        throw data_error("schema",
                         "'" + path + "' needs an index column plus at least one value column");
    }
    const std::string& index_name = table.header.front();
    const bool dated = index_name == "date";
    if (!dated && index_name != "t") {
        throw data_error("schema", "first column of '" + path + "' must be 't' or 'date', got '" +
                                       index_name + "'");
    }
    if (table.rows.empty()) {
        throw data_error("degenerate_input", "'" + path + "' has no data rows");
    }

    const std::size_t n_values = table.header.size() - 1;
    std::vector<std::vector<double>> columns(n_values);
    for (auto& column : columns) column.reserve(table.rows.size());

    long start = 0;
    long previous = 0;
    DateMapping dates;
    dates.month_step = month_step;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const std::string row_no = std::to_string(r + 1);
        const std::vector<std::string>& row = table.rows[r];
        if (dated) {
            YearMonth ym;
            if (!parse_year_month(row.front(), ym)) {
                throw data_error("parse", "cannot parse date '" + row.front() + "' at row " +
                                              row_no + ", column 'date' of '" + path +
                                              "' (expected YYYY-MM)");
            }
            const long months = month_count(ym);
            if (r == 0) {
                dates.base_year = ym.year;
                dates.base_month = ym.month;
            } else if (months != previous + month_step) {
                throw data_error("parse", "non-contiguous date at row " + row_no + " of '" + path +
                                              "': rows must advance by " +
                                              std::to_string(month_step) + " month(s)");
            }
            previous = months;
        } else {
            const long t = parse_row_index(row.front(), "row " + row_no + ", column 't' of '" +
                                                            path + "'");
            if (r == 0) {
                start = t;
            } else if (t != previous + 1) {
                throw data_error("parse",
                                 "non-contiguous t at row " + row_no + " of '" + path + "'");
            }
            previous = t;
        }
        for (std::size_t c = 0; c < n_values; ++c) {
            const std::string where =
                "row " + row_no + ", column '" + table.header[c + 1] + "' of '" + path + "'";
            const double value = csv::parse_double(row[c + 1], where);
            if (!std::isfinite(value)) {
                throw data_error("non_finite", "non-finite value at " + where);
            }
            columns[c].push_back(value);
        }
    }

    Frame frame(dated ? 0 : start);
    for (std::size_t c = 0; c < n_values; ++c) {
        frame.add_column(table.header[c + 1], std::move(columns[c]));
    }
    frame.require_valid();
    if (dated && mapping != nullptr) *mapping = dates;
    return frame;
}

TimeSeries ingest_series(const std::string& path, const std::string& column,
                         std::optional<DateMapping>* mapping) {
    const Frame frame = ingest_frame(path, mapping);
    std::string pick = column;
    if (pick.empty()) {
        if (frame.n_cols() != 1) {
            throw usage_error("invalid_config", "'" + path + "' has " +
                                                    std::to_string(frame.n_cols()) +
                                                    " value columns; pass --column to choose one");
        }
        pick = frame.name_at(0);
    } else if (!frame.has_column(pick)) {
        throw data_error("schema", "no column '" + pick + "' in '" + path + "'");
    }
    return frame.series(pick);
}

Frame upsample_quarterly(const Frame& quarterly) {
    quarterly.require_valid();
    const std::size_t n = quarterly.n_rows();
    if (n < 2) {
        throw data_error("degenerate_input", "quarterly upsampling needs at least two rows");
    }
    const long first_month = 3 * quarterly.start_index();
    const std::size_t length = 3 * n;
    const double h = 3.0;
    const double x0 = static_cast<double>(first_month) + 1.0;  // first knot
    Frame monthly(first_month);
    for (std::size_t c = 0; c < quarterly.n_cols(); ++c) {
        const std::vector<double>& y = quarterly.column_at(c);
        const std::vector<double> m2 = natural_second_derivatives(y, h);
        const double left_slope = (y[1] - y[0]) / h - h * m2[1] / 6.0;
        const double right_slope = (y[n - 1] - y[n - 2]) / h + h * m2[n - 2] / 6.0;
        const double xn = x0 + h * static_cast<double>(n - 1);  // last knot
        std::vector<double> values;
        values.reserve(length);
        for (std::size_t j = 0; j < length; ++j) {
            const double x = static_cast<double>(first_month) + static_cast<double>(j);
            double v = 0.0;
            if (x < x0) {
                v = y[0] + left_slope * (x - x0);
            } else if (x > xn) {
                v = y[n - 1] + right_slope * (x - xn);
            } else {
                const std::size_t i =
                    std::min(static_cast<std::size_t>((x - x0) / h), n - 2);
                const double a = (x0 + h * static_cast<double>(i + 1) - x) / h;
                const double b = (x - (x0 + h * static_cast<double>(i))) / h;
                v = a * y[i] + b * y[i + 1] +
                    ((a * a * a - a) * m2[i] + (b * b * b - b) * m2[i + 1]) * h * h / 6.0;
            }
            values.push_back(v);
        }
        monthly.add_column(quarterly.name_at(c), std::move(values));
    }
    monthly.require_valid();
    return monthly;
}

Frame merge_frames(const Frame& left, const Frame& right) {
    left.require_valid();
    right.require_valid();
    const long first = std::max(left.start_index(), right.start_index());
    const long last = std::min(left.start_index() + static_cast<long>(left.n_rows()) - 1,
                               right.start_index() + static_cast<long>(right.n_rows()) - 1);
    if (first > last) {
        throw data_error("degenerate_input", "frames do not overlap in time");
    }
    Frame merged = left.slice(first, last);
    const Frame clipped = right.slice(first, last);
    for (std::size_t c = 0; c < clipped.n_cols(); ++c) {
        const std::string& name = clipped.name_at(c);
        if (merged.has_column(name)) {
            throw data_error("schema", "duplicate column '" + name + "' when merging frames");
        }
        merged.add_column(name, clipped.column_at(c));
    }
    return merged;
}

}  // namespace bubblelab::cli
