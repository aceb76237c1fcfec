#pragma once

#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mmdkit/types.hpp"

namespace mmdkit {

struct CsvOptions {
    bool has_header = false;
    char delimiter = ',';
};

namespace detail {

inline bool parse_double(std::string_view cell, double& out) {
    // Trim surrounding whitespace; std::from_chars wants a bare number.
    std::size_t b = 0, e = cell.size();
    while (b < e && (cell[b] == ' ' || cell[b] == '\t')) ++b;
    while (e > b && (cell[e - 1] == ' ' || cell[e - 1] == '\t' || cell[e - 1] == '\r')) --e;
    if (b == e) return false;
    const char* first = cell.data() + b;
    const char* last = cell.data() + e;
    const auto res = std::from_chars(first, last, out);
    return res.ec == std::errc() && res.ptr == last;
}

}  // namespace detail

/// Parse a rectangular numeric table: rows are observations, columns are
/// dimensions. `name` appears in error messages.
inline Sample parse_csv(std::istream& in, const CsvOptions& opt, const std::string& name) {
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    bool skipped_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (opt.has_header && !skipped_header) {
            skipped_header = true;
            continue;
        }
        std::vector<double> row;
        std::size_t start = 0, col = 0;
        while (true) {
            const std::size_t pos = line.find(opt.delimiter, start);
            const std::string_view cell =
                std::string_view(line).substr(start, pos == std::string::npos ? std::string::npos : pos - start);
            ++col;
            double v = 0.0;
            if (!detail::parse_double(cell, v))
                throw std::runtime_error(name + ": row " + std::to_string(line_no) + " column " +
                                         std::to_string(col) + ": not numeric: '" + std::string(cell) + "'");
            row.push_back(v);
            if (pos == std::string::npos) break;
            start = pos + 1;
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw std::runtime_error(name + ": row " + std::to_string(line_no) + " has " +
                                     std::to_string(row.size()) + " columns, expected " +
                                     std::to_string(rows.front().size()));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::runtime_error(name + ": empty input");
    Matrix pts(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            pts(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
    return Sample(std::move(pts));
}

inline Sample parse_csv(const std::string& path, const CsvOptions& opt = {}) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path + ": cannot open file");
    return parse_csv(in, opt, path);
}

/// Precomputed Gram file: (m+n) x (m+n) numeric CSV, no header.
inline Matrix parse_gram_csv(const std::string& path) {
    const Sample s = parse_csv(path, CsvOptions{});
    if (s.points.rows() != s.points.cols())
        throw std::runtime_error(path + ": Gram matrix must be square, got " +
                                 std::to_string(s.points.rows()) + "x" + std::to_string(s.points.cols()));
    return s.points;
}

}  // namespace mmdkit
