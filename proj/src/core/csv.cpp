#include "bubblelab/core/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

#include "bubblelab/errors.hpp"

namespace bubblelab::csv {

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

long parse_long(const std::string& cell, const std::string& context) {
    long value = 0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) {
        throw data_error("parse", "cannot parse integer '" + cell + "' at " + context);
    }
    return value;
}

}  // namespace

std::string format_double(double x) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    if (ec != std::errc()) throw numeric_error("format", "cannot format double");
    return std::string(buf, ptr);
}

double parse_double(const std::string& cell, const std::string& context) {
    double value = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) {
        throw data_error("parse", "cannot parse number '" + cell + "' at " + context);
    }
    return value;
}

Table read_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw data_error("missing_file", "cannot open '" + path + "'");
    Table table;
    std::string line;
    std::size_t row_no = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto cells = split_line(line);
        if (row_no == 0) {
            table.header = std::move(cells);
        } else {
            if (cells.size() != table.header.size()) {
                throw data_error("parse", "row " + std::to_string(row_no) + " of '" + path +
                                              "' has " + std::to_string(cells.size()) +
                                              " cells; header has " +
                                              std::to_string(table.header.size()));
            }
            table.rows.push_back(std::move(cells));
        }
        ++row_no;
    }
    if (table.header.empty()) throw data_error("parse", "'" + path + "' has no header row");
    return table;
}

void write_table(const std::string& path, const Table& table) {
    std::ofstream out(path);
    if (!out) throw data_error("missing_file", "cannot write '" + path + "'");
    for (std::size_t i = 0; i < table.header.size(); ++i) {
        if (i) out << ',';
        out << table.header[i];
    }
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ',';
            out << row[i];
        }
        out << '\n';
    }
    if (!out) throw data_error("write_failed", "error writing '" + path + "'");
}

void write_series(const std::string& path, const TimeSeries& series) {
    Table table;
    table.header = {"t", series.label.empty() ? std::string("y") : series.label};
    table.rows.reserve(series.size());
    for (std::size_t i = 0; i < series.size(); ++i) {
        table.rows.push_back({std::to_string(series.start_index + static_cast<long>(i)),
                              format_double(series.values[i])});
    }
    write_table(path, table);
}

TimeSeries read_series(const std::string& path) {
    const Table table = read_table(path);
    if (table.header.size() != 2 || table.header[0] != "t") {
        throw data_error("schema", "'" + path + "' must have header 't,<label>'");
    }
    TimeSeries out;
    out.label = table.header[1];
    out.values.reserve(table.rows.size());
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const std::string where =
            "row " + std::to_string(r + 1) + ", column '" + table.header[1] + "' of '" + path + "'";
        const long t = parse_long(table.rows[r][0], "row " + std::to_string(r + 1) + " of '" + path + "'");
        if (r == 0) {
            out.start_index = t;
        } else if (t != out.start_index + static_cast<long>(r)) {
            throw data_error("parse", "non-contiguous t at row " + std::to_string(r + 1) + " of '" +
                                          path + "'");
        }
        out.values.push_back(parse_double(table.rows[r][1], where));
    }
    if (out.values.empty()) throw data_error("degenerate_input", "'" + path + "' has no data rows");
    return out;
}

void write_frame(const std::string& path, const Frame& frame) {
    Table table;
    table.header.push_back("t");
    for (const auto& name : frame.names()) table.header.push_back(name);
    table.rows.reserve(frame.n_rows());
    for (std::size_t r = 0; r < frame.n_rows(); ++r) {
        std::vector<std::string> row;
        row.reserve(frame.n_cols() + 1);
        row.push_back(std::to_string(frame.start_index() + static_cast<long>(r)));
        for (std::size_t c = 0; c < frame.n_cols(); ++c) {
            row.push_back(format_double(frame.column_at(c)[r]));
        }
        table.rows.push_back(std::move(row));
    }
    write_table(path, table);
}

Frame read_frame(const std::string& path) {
    const Table table = read_table(path);
    if (table.header.size() < 2 || table.header[0] != "t") {
        throw data_error("schema", "'" + path + "' must have header 't,<col>,...'");
    }
    Frame out;
    std::vector<std::vector<double>> cols(table.header.size() - 1);
    long start = 0;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const long t = parse_long(table.rows[r][0], "row " + std::to_string(r + 1) + " of '" + path + "'");
        if (r == 0) {
            start = t;
        } else if (t != start + static_cast<long>(r)) {
            throw data_error("parse", "non-contiguous t at row " + std::to_string(r + 1) + " of '" +
                                          path + "'");
        }
        for (std::size_t c = 1; c < table.header.size(); ++c) {
            const std::string where = "row " + std::to_string(r + 1) + ", column '" +
                                      table.header[c] + "' of '" + path + "'";
            cols[c - 1].push_back(parse_double(table.rows[r][c], where));
        }
    }
    if (table.rows.empty()) throw data_error("degenerate_input", "'" + path + "' has no data rows");
    out.set_start_index(start);
    for (std::size_t c = 1; c < table.header.size(); ++c) {
        out.add_column(table.header[c], std::move(cols[c - 1]));
    }
    return out;
}

}  // namespace bubblelab::csv
