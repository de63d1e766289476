#include "evpanel/dates.hpp"

#include <doctest.h>

using namespace evpanel;

TEST_CASE("ISO parse and format round trip") {
    auto d = Date::parse("2020-03-01");
    REQUIRE(d.has_value());
    CHECK(d->to_string() == "2020-03-01");
    CHECK(Date::parse("2020-02-29").has_value());   // leap year
    CHECK(!Date::parse("2019-02-29").has_value());
    CHECK(!Date::parse("2020-13-01").has_value());
    CHECK(!Date::parse("2020-3-1").has_value());
    CHECK(!Date::parse("garbage").has_value());
}

TEST_CASE("date arithmetic") {
    const Date a = Date::from_ymd(2020, 3, 1);
    const Date b = Date::from_ymd(2020, 3, 10);
    CHECK(b - a == 9);
    CHECK((a + 9) == b);
    CHECK((b - 9) == a);
    CHECK(a < b);
}

TEST_CASE("day of week is Monday-based") {
    CHECK(Date::from_ymd(2020, 3, 2).day_of_week() == 0); // a Monday
    CHECK(Date::from_ymd(2020, 3, 8).day_of_week() == 6); // a Sunday
    CHECK(Date::from_ymd(2020, 2, 29).day_of_week() == 5);
}

TEST_CASE("parse_or_fail carries context") {
    CHECK_THROWS_AS(Date::parse_or_fail("2020/01/01", "somewhere"), Error);
}
