#pragma once

// Internal delimited-text helpers shared by the ingest and export code.

#include <charconv>
#include <cstdio>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "regimealloc/errors.hpp"

namespace regimealloc::csv {

inline std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
    return std::string(s.substr(b, e - b));
}

inline std::vector<std::string> split_line(const std::string& line, char delim = ',') {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = line.find(delim, start);
        if (pos == std::string::npos) {
            out.push_back(trim(std::string_view(line).substr(start)));
            break;
        }
        out.push_back(trim(std::string_view(line).substr(start, pos - start)));
        start = pos + 1;
    }
    return out;
}

/// Parses a full-cell floating-point number; throws ParseError naming the
/// line on anything else.
inline double parse_double(const std::string& cell, std::size_t line_number) {
    double value = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) {
        throw Error(ErrorKind::Parse, "line " + std::to_string(line_number) +
                                          ": cannot parse number '" + cell + "'");
    }
    return value;
}

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> line_numbers;  // 1-based source line of each row
};

/// Reads a whole delimited file; blank lines are skipped. Rows are not
/// required to match the header width here - callers decide what a
/// malformed row means.
inline Table read_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorKind::Argument, "cannot open file: " + path);
    }
    Table table;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (trim(line).empty()) continue;
        auto cells = split_line(line);
        if (table.header.empty()) {
            table.header = std::move(cells);
        } else {
            table.rows.push_back(std::move(cells));
            table.line_numbers.push_back(line_number);
        }
    }
    if (table.header.empty()) {
        throw Error(ErrorKind::Parse, path + ": empty file, expected a header row");
    }
    return table;
}

/// Shortest decimal form that round-trips to the same double.
inline std::string format_double(double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    double back = 0.0;
    std::from_chars(buf, buf + std::char_traits<char>::length(buf), back);
    for (int precision = 1; precision < 17; ++precision) {
        char shorter[32];
        std::snprintf(shorter, sizeof(shorter), "%.*g", precision, value);
        std::from_chars(shorter, shorter + std::char_traits<char>::length(shorter), back);
        if (back == value) return shorter;
    }
    return buf;
}

class Writer {
public:
    explicit Writer(const std::string& path) : out_(path) {
        if (!out_) throw Error(ErrorKind::Argument, "cannot open for writing: " + path);
    }

    void field(const std::string& text) {
        if (!first_) out_ << ',';
        out_ << text;
        first_ = false;
    }
    void field(double value) { field(format_double(value)); }
    void field(int value) { field(std::to_string(value)); }
    void endrow() {
        out_ << '\n';
        first_ = true;
    }

private:
    std::ofstream out_;
    bool first_ = true;
};

}  // namespace regimealloc::csv
