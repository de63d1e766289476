#pragma once

#include "evpanel/error.hpp"

#include <chrono>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>

namespace evpanel {

/// Calendar date stored as days since 1970-01-01. Cheap to copy, totally
/// ordered, and supports day arithmetic, which is all the panel needs.
class Date {
public:
    Date() = default;
    explicit constexpr Date(std::int32_t days_since_epoch) : days_(days_since_epoch) {}

    static Date from_ymd(int year, unsigned month, unsigned day);

    /// Strict ISO-8601 (YYYY-MM-DD). Returns nullopt on malformed input.
    static std::optional<Date> parse(std::string_view iso);

    /// Parse or throw with context (used by ingestion error paths).
    static Date parse_or_fail(std::string_view iso, const std::string& context);

    std::string to_string() const;

    /// 0 = Monday ... 6 = Sunday.
    int day_of_week() const;

    constexpr std::int32_t days_since_epoch() const { return days_; }

    friend constexpr Date operator+(Date d, int days) { return Date(d.days_ + days); }
    friend constexpr Date operator-(Date d, int days) { return Date(d.days_ - days); }
    friend constexpr int operator-(Date a, Date b) { return a.days_ - b.days_; }
    auto operator<=>(const Date&) const = default;

private:
    std::int32_t days_ = 0;
};

} // namespace evpanel
