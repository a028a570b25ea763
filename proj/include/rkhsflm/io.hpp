/*
 * Copyright 2026 The rkhsflm Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#ifndef RKHSFLM_IO_HPP
#define RKHSFLM_IO_HPP

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "rkhsflm/dataset.hpp"
#include "rkhsflm/harness.hpp"

namespace flm {

/** Malformed input file; maps to the usage/parse exit code. */
class CsvParseError : public std::invalid_argument {
  public:
    CsvParseError(const std::string& path, std::size_t line, const std::string& what)
        : std::invalid_argument(path + ":" + std::to_string(line) + ": " + what) {}
};

namespace detail {

/** Shortest decimal that round-trips to the same double. */
inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

/** At most 12 significant digits; used for grid times in headers. */
inline std::string format_time(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 12);
    return std::string(buf, res.ptr);
}

inline std::string format_fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
    return std::string(buf);
}

inline double parse_double(std::string_view token, const std::string& path, std::size_t line) {
    double v = 0.0;
    const char* first = token.data();
    const char* last = token.data() + token.size();
    auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc{} || res.ptr != last)
        throw CsvParseError(path, line, "non-numeric cell '" + std::string(token) + "'");
    return v;
}

inline std::vector<std::string_view> split_line(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return out;
}

}  // namespace detail

/**
 * Dataset CSV schema: one header row "t_<time>,...,t_<time>,y" whose column
 * names carry the grid, then one row per observation. Values use the
 * shortest round-trip decimal form, so write-read-write is byte stable.
 */
inline void write_dataset_csv(std::ostream& os, const FunctionalDataset& data) {
    for (std::size_t j = 0; j < data.m(); ++j) os << "t_" << detail::format_time(data.grid[j]) << ',';
    os << "y\n";
    for (Eigen::Index i = 0; i < data.X.rows(); ++i) {
        for (Eigen::Index j = 0; j < data.X.cols(); ++j)
            os << detail::format_double(data.X(i, j)) << ',';
        os << detail::format_double(data.Y(i)) << '\n';
    }
}

inline void write_dataset_csv(const std::string& path, const FunctionalDataset& data) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
    write_dataset_csv(os, data);
    if (!os) throw std::runtime_error("write to '" + path + "' failed");
}

struct IngestResult {
    FunctionalDataset data;
    double original_min = 0.0;
    double original_max = 1.0;
    bool rescaled = false;
};

/**
 * Parses the dataset schema above. Grids extending beyond [0,1] are mapped
 * affinely onto [0,1] with the original range recorded; grids already
 * inside [0,1] are kept untouched so round-trips stay byte identical.
 */
inline IngestResult ingest_csv(std::istream& is, const std::string& path = "<stream>") {
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(is, line)) throw CsvParseError(path, 1, "empty file");
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto header = detail::split_line(line);
    if (header.size() < 2) throw CsvParseError(path, lineno, "header needs grid columns and 'y'");
    if (header.back() != "y")
        throw CsvParseError(path, lineno, "last header column must be 'y'");
    std::vector<double> times;
    times.reserve(header.size() - 1);
    for (std::size_t j = 0; j + 1 < header.size(); ++j) {
        auto name = header[j];
        if (name.size() < 3 || name.substr(0, 2) != "t_")
            throw CsvParseError(path, lineno, "grid column " + std::to_string(j + 1) +
                                                  " must be named t_<time>");
        times.push_back(detail::parse_double(name.substr(2), path, lineno));
        if (j > 0 && !(times[j] > times[j - 1]))
            throw CsvParseError(path, lineno, "grid times not strictly increasing at column " +
                                                  std::to_string(j + 1));
    }

    double lo = times.front(), hi = times.back();
    bool rescale = lo < -1e-12 || hi > 1.0 + 1e-12;
    if (rescale) {
        if (!(hi > lo)) throw CsvParseError(path, lineno, "degenerate grid range");
        for (double& t : times) t = (t - lo) / (hi - lo);
        times.front() = 0.0;
        times.back() = 1.0;
    }

    const std::size_t m = times.size();
    std::vector<double> xs;
    std::vector<double> ys;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto cells = detail::split_line(line);
        if (cells.size() != m + 1)
            throw CsvParseError(path, lineno,
                                "expected " + std::to_string(m + 1) + " cells, got " +
                                    std::to_string(cells.size()));
        for (std::size_t j = 0; j < m; ++j)
            xs.push_back(detail::parse_double(cells[j], path, lineno));
        ys.push_back(detail::parse_double(cells[m], path, lineno));
    }
    const std::size_t n = ys.size();
    Eigen::MatrixXd x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j)
            x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = xs[i * m + j];
    Eigen::VectorXd y = Eigen::Map<Eigen::VectorXd>(ys.data(), static_cast<Eigen::Index>(n));
    return IngestResult{FunctionalDataset(Grid(std::move(times)), std::move(x), std::move(y)), lo,
                        hi, rescale};
}

inline IngestResult ingest_csv_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw CsvParseError(path, 0, "cannot open file");
    return ingest_csv(is, path);
}

/**
 * Long-form CSV for a report table: metadata as '#' comment lines, then one
 * row per (estimator, n) with means and Monte-Carlo standard errors.
 */
inline void write_table_csv(std::ostream& os, const ReportTable& table) {
    os << "# table=" << table.title << " scenario=" << table.scenario << " seed=" << table.seed
       << " replications=" << table.replications << " m=" << table.grid_m << '\n';
    os << "estimator,n,pred_error,pred_error_se,r2a,r2a_se,rkhs_error,rkhs_error_se\n";
    auto cell = [&](const std::optional<CellStat>& s, std::string& a, std::string& b) {
        if (s) {
            a = detail::format_double(s->mean);
            b = detail::format_double(s->se);
        } else {
            a.clear();
            b.clear();
        }
    };
    for (const auto& row : table.rows) {
        std::string c1, c2, c3, c4, c5, c6;
        cell(row.pred_error, c1, c2);
        cell(row.r2a, c3, c4);
        cell(row.rkhs_error, c5, c6);
        os << row.estimator << ',' << row.n << ',' << c1 << ',' << c2 << ',' << c3 << ',' << c4
           << ',' << c5 << ',' << c6 << '\n';
    }
}

namespace detail {

inline void write_markdown_grid(std::ostream& os, const ReportTable& table,
                                const char* caption,
                                const std::optional<CellStat> ReportRow::*field) {
    os << "**" << caption << "** (mean over " << table.replications
       << " replications, MC-SE in parentheses)\n\n";

    // assemble all cells first, then pad every column to a common width
    std::vector<std::vector<std::string>> cells;
    std::vector<std::string> head{"estimator"};
    for (std::size_t n : table.n_list) head.push_back("n=" + std::to_string(n));
    cells.push_back(std::move(head));
    for (const auto& label : table.estimator_labels) {
        std::vector<std::string> row{label};
        for (std::size_t n : table.n_list) {
            const auto& stat = table.cell(label, n).*field;
            row.push_back(stat ? format_fixed(stat->mean, 5) + " (" +
                                     format_fixed(stat->se, 5) + ")"
                               : "");
        }
        cells.push_back(std::move(row));
    }
    std::vector<std::size_t> width(cells[0].size(), 3);
    for (const auto& row : cells)
        for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
    auto emit_row = [&](const std::vector<std::string>& row) {
        os << '|';
        for (std::size_t c = 0; c < row.size(); ++c) {
            os << ' ' << row[c] << std::string(width[c] - row[c].size(), ' ') << " |";
        }
        os << '\n';
    };
    emit_row(cells[0]);
    os << '|';
    for (std::size_t c = 0; c < width.size(); ++c) os << std::string(width[c] + 2, '-') << '|';
    os << '\n';
    for (std::size_t r = 1; r < cells.size(); ++r) emit_row(cells[r]);
    os << '\n';
}

}  // namespace detail

/** Markdown grid in the published layout: estimator rows by sample-size columns. */
inline void write_table_markdown(std::ostream& os, const ReportTable& table) {
    os << "# " << table.title << "\n\n";
    os << "scenario " << table.scenario << ", m=" << table.grid_m << ", seed=" << table.seed
       << "\n\n";
    bool any_pred = false, any_r2 = false, any_rkhs = false;
    for (const auto& row : table.rows) {
        any_pred |= row.pred_error.has_value();
        any_r2 |= row.r2a.has_value();
        any_rkhs |= row.rkhs_error.has_value();
    }
    if (any_pred)
        detail::write_markdown_grid(os, table, "Prediction error", &ReportRow::pred_error);
    if (any_r2) detail::write_markdown_grid(os, table, "Adjusted R^2", &ReportRow::r2a);
    if (any_rkhs)
        detail::write_markdown_grid(os, table, "RKHS error ||a_p - a||_K^2",
                                    &ReportRow::rkhs_error);
}

inline void write_table_file(const std::string& path, const ReportTable& table,
                             const std::string& format) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
    if (format == "csv")
        write_table_csv(os, table);
    else if (format == "md")
        write_table_markdown(os, table);
    else
        throw std::invalid_argument("unknown table format '" + format + "' (expected csv or md)");
    if (!os) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace flm

#endif  // RKHSFLM_IO_HPP
