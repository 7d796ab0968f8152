#pragma once

// UTC timestamps at second resolution. Incident files use the fixed form
// "YYYY-MM-DDTHH:MM:SSZ"; anything else is rejected. No locale, no TZ
// database, no leap seconds.

#include <cctype>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

namespace cntmf {

using UtcSeconds = std::int64_t;  // seconds since 1970-01-01T00:00:00Z

namespace detail {

// Days since the epoch for a civil date (Hinnant's algorithm).
constexpr std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const auto yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

struct Civil {
    std::int64_t year;
    unsigned month;
    unsigned day;
};

constexpr Civil civil_from_days(std::int64_t z) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const auto doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp < 10 ? mp + 3 : mp - 9;
    return Civil{y + (m <= 2), m, d};
}

constexpr bool is_leap_year(std::int64_t y) {
    return y % 4 == 0 && (y % 100 != 0 || y % 400 == 0);
}

constexpr unsigned days_in_month(std::int64_t y, unsigned m) {
    constexpr unsigned lengths[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m == 2 && is_leap_year(y)) return 29;
    return lengths[m - 1];
}

inline bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s) {
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    }
    return true;
}

inline unsigned to_unsigned(std::string_view s) {
    unsigned v = 0;
    for (char c : s) v = v * 10 + static_cast<unsigned>(c - '0');
    return v;
}

}  // namespace detail

// Strict "YYYY-MM-DD"; midnight UTC.
inline std::optional<UtcSeconds> parse_utc_date(std::string_view s) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
    if (!detail::all_digits(s.substr(0, 4)) || !detail::all_digits(s.substr(5, 2)) ||
        !detail::all_digits(s.substr(8, 2))) {
        return std::nullopt;
    }
    const unsigned year = detail::to_unsigned(s.substr(0, 4));
    const unsigned month = detail::to_unsigned(s.substr(5, 2));
    const unsigned day = detail::to_unsigned(s.substr(8, 2));
    if (month < 1 || month > 12) return std::nullopt;
    if (day < 1 || day > detail::days_in_month(year, month)) return std::nullopt;
    return detail::days_from_civil(year, month, day) * 86400;
}

// Strict "YYYY-MM-DDTHH:MM:SSZ".
inline std::optional<UtcSeconds> parse_utc(std::string_view s) {
    if (s.size() != 20 || s[10] != 'T' || s[13] != ':' || s[16] != ':' || s[19] != 'Z') {
        return std::nullopt;
    }
    auto date = parse_utc_date(s.substr(0, 10));
    if (!date) return std::nullopt;
    if (!detail::all_digits(s.substr(11, 2)) || !detail::all_digits(s.substr(14, 2)) ||
        !detail::all_digits(s.substr(17, 2))) {
        return std::nullopt;
    }
    const unsigned hour = detail::to_unsigned(s.substr(11, 2));
    const unsigned minute = detail::to_unsigned(s.substr(14, 2));
    const unsigned second = detail::to_unsigned(s.substr(17, 2));
    if (hour > 23 || minute > 59 || second > 59) return std::nullopt;
    return *date + hour * 3600 + minute * 60 + second;
}

inline std::string format_utc(UtcSeconds t) {
    std::int64_t days = t / 86400;
    std::int64_t rem = t % 86400;
    if (rem < 0) {
        rem += 86400;
        days -= 1;
    }
    const detail::Civil c = detail::civil_from_days(days);
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%04lld-%02u-%02uT%02lld:%02lld:%02lldZ",
                  static_cast<long long>(c.year), c.month, c.day,
                  static_cast<long long>(rem / 3600), static_cast<long long>(rem / 60 % 60),
                  static_cast<long long>(rem % 60));
    return buf;
}

// Half-open [begin, end).
struct TimeRange {
    UtcSeconds begin = 0;
    UtcSeconds end = 0;

    bool contains(UtcSeconds t) const { return t >= begin && t < end; }
    bool operator==(const TimeRange&) const = default;
};

struct Quarter {
    int year = 1970;
    int q = 1;  // 1..4

    bool operator==(const Quarter&) const = default;
};

// "YYYYQn" with n in 1..4.
inline std::optional<Quarter> parse_quarter(std::string_view s) {
    if (s.size() != 6 || (s[4] != 'Q' && s[4] != 'q')) return std::nullopt;
    if (!detail::all_digits(s.substr(0, 4)) || !detail::all_digits(s.substr(5, 1))) {
        return std::nullopt;
    }
    const int q = static_cast<int>(detail::to_unsigned(s.substr(5, 1)));
    if (q < 1 || q > 4) return std::nullopt;
    return Quarter{static_cast<int>(detail::to_unsigned(s.substr(0, 4))), q};
}

inline TimeRange quarter_range(const Quarter& quarter) {
    const unsigned first_month = static_cast<unsigned>((quarter.q - 1) * 3 + 1);
    const std::int64_t begin = detail::days_from_civil(quarter.year, first_month, 1) * 86400;
    const int next_q = quarter.q == 4 ? 1 : quarter.q + 1;
    const int next_year = quarter.q == 4 ? quarter.year + 1 : quarter.year;
    const std::int64_t end =
        detail::days_from_civil(next_year, static_cast<unsigned>((next_q - 1) * 3 + 1), 1) * 86400;
    return TimeRange{begin, end};
}

inline std::string quarter_label(const Quarter& quarter) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04dQ%d", quarter.year, quarter.q);
    return buf;
}

}  // namespace cntmf
