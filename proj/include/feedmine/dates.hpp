#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace feedmine::dates {

/// Calendar date, UTC. Comparable; days_from_civil gives the linear order.
struct Date {
    int year = 1970;
    unsigned month = 1; // 1..12
    unsigned day = 1;   // 1..31
    friend auto operator<=>(const Date &, const Date &) = default;
};

/// Days since 1970-01-01 (Howard Hinnant's civil-days algorithm).
std::int64_t days_from_civil(const Date &d);
Date civil_from_days(std::int64_t z);

/// Whole UTC days elapsed since the epoch; floors within the day.
std::int64_t day_of_epoch(std::int64_t epoch_seconds);

/// 0 = Monday .. 6 = Sunday.
int weekday(std::int64_t days);

/// Epoch-day of the Monday starting the week that contains `days`.
std::int64_t week_start(std::int64_t days);

Date parse_iso_date(std::string_view s); // "YYYY-MM-DD"
std::string format_iso(const Date &d);
std::string format_iso(std::int64_t days);

bool is_leap(int year);
unsigned days_in_month(int year, unsigned month);

} // namespace feedmine::dates
