#include "regimealloc/date.hpp"

#include <charconv>
#include <cstdio>

#include "regimealloc/errors.hpp"

namespace regimealloc {

namespace {

int parse_int_field(std::string_view text, std::string_view what,
                    const std::string& source) {
    int value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw Error(ErrorKind::Parse,
                    "invalid " + std::string(what) + " in date '" + source + "'");
    }
    return value;
}

int days_in_month(int year, int month) {
    static constexpr int lengths[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (month == 2) {
        bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
        return leap ? 29 : 28;
    }
    return lengths[month - 1];
}

}  // namespace

Date Date::parse(const std::string& text) {
    // Strict YYYY-MM-DD.
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
        throw Error(ErrorKind::Parse, "invalid date '" + text + "', expected YYYY-MM-DD");
    }
    std::string_view sv(text);
    Date d;
    d.year = parse_int_field(sv.substr(0, 4), "year", text);
    d.month = parse_int_field(sv.substr(5, 2), "month", text);
    d.day = parse_int_field(sv.substr(8, 2), "day", text);
    if (d.month < 1 || d.month > 12) {
        throw Error(ErrorKind::Parse, "month out of range in date '" + text + "'");
    }
    if (d.day < 1 || d.day > days_in_month(d.year, d.month)) {
        throw Error(ErrorKind::Parse, "day out of range in date '" + text + "'");
    }
    return d;
}

std::string Date::to_string() const {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year, month, day);
    return buf;
}

MonthKey MonthKey::parse(const std::string& text) {
    if (text.size() != 7 || text[4] != '-') {
        throw Error(ErrorKind::Parse, "invalid month '" + text + "', expected YYYY-MM");
    }
    std::string_view sv(text);
    MonthKey m;
    m.year = parse_int_field(sv.substr(0, 4), "year", text);
    m.month = parse_int_field(sv.substr(5, 2), "month", text);
    if (m.month < 1 || m.month > 12) {
        throw Error(ErrorKind::Parse, "month out of range in '" + text + "'");
    }
    return m;
}

std::string MonthKey::to_string() const {
    char buf[8];
    std::snprintf(buf, sizeof(buf), "%04d-%02d", year, month);
    return buf;
}

}  // namespace regimealloc
