#pragma once

#include <Eigen/Core>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hdpa::csv {

/// Formats a double with 17 significant digits, locale-independent.
/// 17 digits round-trip any IEEE-754 double exactly.
inline std::string format_double(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof buffer, "%.17g", value);
    return buffer;
}

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline bool parse_field(std::string_view field, double& out) {
    // Trim surrounding spaces and a possible trailing '\r'.
    while (!field.empty() && (field.front() == ' ' || field.front() == '\t'))
        field.remove_prefix(1);
    while (!field.empty() &&
           (field.back() == ' ' || field.back() == '\t' || field.back() == '\r'))
        field.remove_suffix(1);
    if (field.empty()) return false;
    const char* begin = field.data();
    const char* end = begin + field.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc{} && ptr == end;
}

inline bool parse_row(const std::string& line, std::vector<double>& row) {
    row.clear();
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        const std::size_t len = (comma == std::string::npos ? line.size() : comma) - start;
        double value = 0.0;
        if (!parse_field(std::string_view(line).substr(start, len), value)) return false;
        row.push_back(value);
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return true;
}

}  // namespace detail

/// Reads a dense numeric matrix (rows = observations). A first line that does
/// not parse as numbers is treated as a header and skipped. Throws ParseError
/// on malformed content or empty input.
inline Eigen::MatrixXd read_matrix(std::istream& in) {
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    bool first_content_line = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        std::vector<double> row;
        if (!detail::parse_row(line, row)) {
            if (first_content_line) {
                first_content_line = false;  // header
                continue;
            }
            throw ParseError("CSV parse error at line " + std::to_string(line_no));
        }
        first_content_line = false;
        if (!rows.empty() && row.size() != rows.front().size())
            throw ParseError("CSV column count mismatch at line " + std::to_string(line_no));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError("CSV contains no numeric rows");
    Eigen::MatrixXd data(static_cast<Eigen::Index>(rows.size()),
                         static_cast<Eigen::Index>(rows.front().size()));
    for (Eigen::Index i = 0; i < data.rows(); ++i)
        for (Eigen::Index j = 0; j < data.cols(); ++j)
            data(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    return data;
}

inline Eigen::MatrixXd read_matrix_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open CSV file: " + path);
    return read_matrix(in);
}

inline void write_matrix(std::ostream& out, const Eigen::MatrixXd& data) {
    for (Eigen::Index i = 0; i < data.rows(); ++i) {
        for (Eigen::Index j = 0; j < data.cols(); ++j) {
            if (j > 0) out << ',';
            out << format_double(data(i, j));
        }
        out << '\n';
    }
}

}  // namespace hdpa::csv
