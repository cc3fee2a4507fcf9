#pragma once

// Calendar helpers: ISO dates and minute-resolution timestamps.

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace cohortc::date {

using Date = std::chrono::year_month_day;

/// "YYYY-MM-DD"; nullopt unless the text is exactly that shape and a real day.
std::optional<Date> parse_date(std::string_view s);
std::string format_date(const Date& d);

/// Same day `years` earlier; Feb 29 clamps to Feb 28 in common years.
Date minus_years(const Date& d, int years);

/// Whole years between `birth` and `reference`.
int age_at(const Date& birth, const Date& reference);

Date today();

/// Minutes since 1970-01-01 00:00 for "YYYY-MM-DD HH:MM[:SS]" (seconds ignored).
std::optional<std::int64_t> parse_timestamp_minutes(std::string_view s);
/// "YYYY-MM-DD HH:MM:00".
std::string format_timestamp_minutes(std::int64_t minutes);

/// Last representable minute of a day, "YYYY-MM-DD 23:59:59".
std::string end_of_day(const Date& d);

}  // namespace cohortc::date
