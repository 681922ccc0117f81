#pragma once

#include <compare>
#include <string>

namespace regimealloc {

/// Calendar date. Only validity of the (year, month, day) triple is checked;
/// no timezone or calendar arithmetic beyond ordering is needed here.
struct Date {
    int year = 0;
    int month = 0;  // 1..12
    int day = 0;    // 1..31

    auto operator<=>(const Date&) const = default;

    /// Parses strict ISO-8601 "YYYY-MM-DD". Throws ParseError on malformed input.
    static Date parse(const std::string& text);

    std::string to_string() const;
};

/// (year, month) key identifying one calendar month.
struct MonthKey {
    int year = 0;
    int month = 0;

    auto operator<=>(const MonthKey&) const = default;

    std::string to_string() const;  // "YYYY-MM"

    /// Parses "YYYY-MM". Throws ParseError on malformed input.
    static MonthKey parse(const std::string& text);
};

inline MonthKey month_of(const Date& d) { return MonthKey{d.year, d.month}; }

}  // namespace regimealloc
