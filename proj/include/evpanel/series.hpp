#pragma once

#include "evpanel/dates.hpp"
#include "evpanel/types.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace evpanel {

/// Daily intensity path of one policy in one country. Entries are change
/// points: the level persists until the next entry, dates before the first
/// entry are level 0. A schedule with no entries is the all-zero schedule.
class PolicySchedule {
public:
    PolicySchedule(std::string country, PolicyKind policy, std::map<Date, int> levels);

    const std::string& country() const { return country_; }
    PolicyKind policy() const { return policy_; }
    const std::map<Date, int>& entries() const { return levels_; }

    int level_on(Date d) const;

    /// First calendar date with level > 0; nullopt when the policy never activates.
    std::optional<Date> implementation_date() const { return implementation_; }
    /// Level on the implementation day (0 when the policy never activates).
    int implementation_level() const { return implementation_level_; }

private:
    std::string country_;
    PolicyKind policy_;
    std::map<Date, int> levels_;
    std::optional<Date> implementation_;
    int implementation_level_ = 0;
};

/// Daily confirmed-case series for one country, stored contiguously from the
/// earliest listed date. Cumulative counts are non-decreasing and consistent
/// with the daily counts by construction.
class EpiSeries {
public:
    /// Gaps between listed days count as zero new cases.
    static EpiSeries from_daily_new_cases(std::string country, const std::map<Date, std::int64_t>& daily);

    /// Validates monotonicity and new/cumulative consistency; throws on violation.
    static EpiSeries from_new_and_cumulative(std::string country, Date start,
                                             std::vector<std::int64_t> new_cases,
                                             std::vector<std::int64_t> cumulative);

    const std::string& country() const { return country_; }
    Date start_date() const { return start_; }
    Date last_date() const { return start_ + static_cast<int>(new_cases_.size()) - 1; }
    std::size_t size() const { return new_cases_.size(); }

    std::int64_t new_cases_at(Date d) const;
    std::int64_t cumulative_at(Date d) const; // 0 before start

    /// Earliest date with cumulative >= 1; nullopt when no case was ever recorded.
    std::optional<Date> first_case_date() const;

private:
    EpiSeries() = default;
    std::string country_;
    Date start_;
    std::vector<std::int64_t> new_cases_;
    std::vector<std::int64_t> cumulative_;
};

/// Percentage-point deviations from the pre-pandemic baseline, per place
/// category. Missing days stay missing; they are never imputed.
class MobilitySeries {
public:
    explicit MobilitySeries(std::string country) : country_(std::move(country)) {}

    const std::string& country() const { return country_; }

    /// Throws when the deviation falls outside the sanity band [-100, +500].
    void set(MobilityCategory cat, Date d, double deviation_pp);

    std::optional<double> value(MobilityCategory cat, Date d) const;
    const std::map<Date, double>& values(MobilityCategory cat) const {
        return values_[static_cast<std::size_t>(cat)];
    }

    static constexpr double kMinDeviation = -100.0;
    static constexpr double kMaxDeviation = 500.0;

private:
    std::string country_;
    std::array<std::map<Date, double>, kMobilityCategoryCount> values_;
};

struct CountryCovariates {
    std::string country;
    Region region = Region::Europe;
    double gdp_per_capita = 0.0;
    double population = 0.0;
    double population_density = 0.0; // persons per km^2
    double urbanization_rate = 0.0;  // percent, in [0, 100]

    /// Throws on non-positive magnitudes or urbanization outside [0, 100].
    void validate() const;
};

} // namespace evpanel
