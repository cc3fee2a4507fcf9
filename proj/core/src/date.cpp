#include "cohortc/date.hpp"

#include <charconv>
#include <cstdio>

namespace cohortc::date {

namespace {

bool digits(std::string_view s, std::size_t pos, std::size_t n, int& out) {
    if (pos + n > s.size()) return false;
    for (std::size_t i = pos; i < pos + n; ++i) {
        if (s[i] < '0' || s[i] > '9') return false;
    }
    std::from_chars(s.data() + pos, s.data() + pos + n, out);
    return true;
}

}  // namespace

std::optional<Date> parse_date(std::string_view s) {
    int y = 0, m = 0, d = 0;
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
    if (!digits(s, 0, 4, y) || !digits(s, 5, 2, m) || !digits(s, 8, 2, d)) return std::nullopt;
    Date out{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
             std::chrono::day{static_cast<unsigned>(d)}};
    if (!out.ok()) return std::nullopt;
    return out;
}

std::string format_date(const Date& d) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()),
                  static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
    return buf;
}

Date minus_years(const Date& d, int years) {
    Date out = d - std::chrono::years{years};
    if (!out.ok()) out = Date{out.year() / out.month() / std::chrono::last};
    return out;
}

int age_at(const Date& birth, const Date& reference) {
    int age = static_cast<int>(reference.year()) - static_cast<int>(birth.year());
    auto md = [](const Date& x) { return static_cast<unsigned>(x.month()) * 100 + static_cast<unsigned>(x.day()); };
    if (md(reference) < md(birth)) --age;
    return age;
}

Date today() {
    return Date{std::chrono::floor<std::chrono::days>(std::chrono::system_clock::now())};
}

std::optional<std::int64_t> parse_timestamp_minutes(std::string_view s) {
    if (s.size() < 16 || s[10] != ' ' || s[13] != ':') return std::nullopt;
    auto d = parse_date(s.substr(0, 10));
    int hh = 0, mm = 0;
    if (!d || !digits(s, 11, 2, hh) || !digits(s, 14, 2, mm) || hh > 23 || mm > 59) return std::nullopt;
    std::int64_t days = std::chrono::sys_days{*d}.time_since_epoch().count();
    return days * 1440 + hh * 60 + mm;
}

std::string format_timestamp_minutes(std::int64_t minutes) {
    std::int64_t days = minutes >= 0 ? minutes / 1440 : -((-minutes + 1439) / 1440);
    std::int64_t rem = minutes - days * 1440;
    Date d{std::chrono::sys_days{std::chrono::days{days}}};
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s %02d:%02d:00", format_date(d).c_str(), static_cast<int>(rem / 60),
                  static_cast<int>(rem % 60));
    return buf;
}

std::string end_of_day(const Date& d) { return format_date(d) + " 23:59:59"; }

}  // namespace cohortc::date
