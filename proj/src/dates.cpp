#include "evpanel/dates.hpp"

#include <charconv>
#include <cstdio>

namespace evpanel {

namespace {

std::chrono::sys_days to_sys_days(Date d) {
    return std::chrono::sys_days{std::chrono::days{d.days_since_epoch()}};
}

} // namespace

Date Date::from_ymd(int year, unsigned month, unsigned day) {
    using namespace std::chrono;
    year_month_day ymd{std::chrono::year{year}, std::chrono::month{month}, std::chrono::day{day}};
    if (!ymd.ok())
        fail("invalid calendar date: " + std::to_string(year) + "-" + std::to_string(month) + "-" +
             std::to_string(day));
    return Date(static_cast<std::int32_t>(sys_days{ymd}.time_since_epoch().count()));
}

std::optional<Date> Date::parse(std::string_view iso) {
    // YYYY-MM-DD, digits only, fixed width
    if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-')
        return std::nullopt;
    int y = 0;
    unsigned m = 0, d = 0;
    auto num = [](std::string_view s, auto& out) {
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
        return ec == std::errc{} && p == s.data() + s.size();
    };
    if (!num(iso.substr(0, 4), y) || !num(iso.substr(5, 2), m) || !num(iso.substr(8, 2), d))
        return std::nullopt;
    std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
    if (!ymd.ok())
        return std::nullopt;
    return Date(static_cast<std::int32_t>(std::chrono::sys_days{ymd}.time_since_epoch().count()));
}

Date Date::parse_or_fail(std::string_view iso, const std::string& context) {
    auto d = parse(iso);
    if (!d)
        fail(context + ": unparseable date '" + std::string(iso) + "' (expected YYYY-MM-DD)");
    return *d;
}

std::string Date::to_string() const {
    std::chrono::year_month_day ymd{to_sys_days(*this)};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

int Date::day_of_week() const {
    std::chrono::weekday wd{to_sys_days(*this)};
    return static_cast<int>(wd.iso_encoding()) - 1; // ISO: Monday = 1
}

} // namespace evpanel
