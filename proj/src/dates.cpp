#include "feedmine/dates.hpp"

#include "feedmine/errors.hpp"

#include <cstdio>

namespace feedmine::dates {

std::int64_t days_from_civil(const Date &d) {
    std::int64_t y = d.year;
    const unsigned m = d.month;
    const unsigned day = d.day;
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + day - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

Date civil_from_days(std::int64_t z) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp + (mp < 10 ? 3 : -9);
    return Date{static_cast<int>(y + (m <= 2)), m, d};
}

std::int64_t day_of_epoch(std::int64_t epoch_seconds) {
    std::int64_t d = epoch_seconds / 86400;
    if (epoch_seconds < 0 && epoch_seconds % 86400 != 0)
        --d;
    return d;
}

int weekday(std::int64_t days) {
    // 1970-01-01 was a Thursday (= 3 with Monday as 0).
    std::int64_t w = (days + 3) % 7;
    if (w < 0)
        w += 7;
    return static_cast<int>(w);
}

std::int64_t week_start(std::int64_t days) { return days - weekday(days); }

Date parse_iso_date(std::string_view s) {
    int y = 0;
    unsigned m = 0, d = 0;
    if (std::sscanf(std::string(s).c_str(), "%d-%u-%u", &y, &m, &d) != 3 || m < 1 || m > 12 ||
        d < 1 || d > days_in_month(y, m))
        throw ParseError("invalid ISO date: '" + std::string(s) + "'");
    return Date{y, m, d};
}

std::string format_iso(const Date &d) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", d.year, d.month, d.day);
    return buf;
}

std::string format_iso(std::int64_t days) { return format_iso(civil_from_days(days)); }

bool is_leap(int year) { return year % 4 == 0 && (year % 100 != 0 || year % 400 == 0); }

unsigned days_in_month(int year, unsigned month) {
    static constexpr unsigned kDays[13] = {0, 31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (month == 2 && is_leap(year))
        return 29;
    return kDays[month];
}

} // namespace feedmine::dates
