#include "evpanel/series.hpp"

#include "evpanel/error.hpp"

namespace evpanel {

PolicySchedule::PolicySchedule(std::string country, PolicyKind policy, std::map<Date, int> levels)
    : country_(std::move(country)), policy_(policy), levels_(std::move(levels)) {
    for (const auto& [date, level] : levels_) {
        if (!valid_intensity(level))
            fail("policy schedule " + country_ + "/" + std::string(policy_name(policy_)) +
                 ": intensity " + std::to_string(level) + " on " + date.to_string() +
                 " outside [0, 6]");
        if (level > 0 && !implementation_) {
            implementation_ = date;
            implementation_level_ = level;
        }
    }
}

int PolicySchedule::level_on(Date d) const {
    auto it = levels_.upper_bound(d);
    if (it == levels_.begin())
        return 0;
    return std::prev(it)->second;
}

EpiSeries EpiSeries::from_daily_new_cases(std::string country, const std::map<Date, std::int64_t>& daily) {
    if (daily.empty())
        fail("case series for " + country + " is empty");
    EpiSeries s;
    s.country_ = std::move(country);
    s.start_ = daily.begin()->first;
    const int n = daily.rbegin()->first - s.start_ + 1;
    s.new_cases_.assign(n, 0);
    for (const auto& [date, count] : daily) {
        if (count < 0)
            fail("case series for " + s.country_ + ": negative new-case count on " + date.to_string());
        s.new_cases_[date - s.start_] = count;
    }
    s.cumulative_.resize(n);
    std::int64_t running = 0;
    for (int i = 0; i < n; ++i) {
        running += s.new_cases_[i];
        s.cumulative_[i] = running;
    }
    return s;
}

EpiSeries EpiSeries::from_new_and_cumulative(std::string country, Date start,
                                             std::vector<std::int64_t> new_cases,
                                             std::vector<std::int64_t> cumulative) {
    if (new_cases.empty() || new_cases.size() != cumulative.size())
        fail("case series for " + country + ": new/cumulative length mismatch");
    for (std::size_t i = 0; i < new_cases.size(); ++i) {
        const Date d = start + static_cast<int>(i);
        if (new_cases[i] < 0)
            fail("case series for " + country + ": negative new-case count on " + d.to_string());
        const std::int64_t prev = i == 0 ? 0 : cumulative[i - 1];
        if (cumulative[i] < prev)
            fail("case series for " + country + ": cumulative decreases on " + d.to_string());
        if (cumulative[i] - prev != new_cases[i])
            fail("case series for " + country + ": cumulative and new cases inconsistent on " +
                 d.to_string());
    }
    EpiSeries s;
    s.country_ = std::move(country);
    s.start_ = start;
    s.new_cases_ = std::move(new_cases);
    s.cumulative_ = std::move(cumulative);
    return s;
}

std::int64_t EpiSeries::new_cases_at(Date d) const {
    const int i = d - start_;
    if (i < 0 || i >= static_cast<int>(new_cases_.size()))
        return 0;
    return new_cases_[i];
}

std::int64_t EpiSeries::cumulative_at(Date d) const {
    const int i = d - start_;
    if (i < 0)
        return 0;
    if (i >= static_cast<int>(cumulative_.size()))
        return cumulative_.back();
    return cumulative_[i];
}

std::optional<Date> EpiSeries::first_case_date() const {
    for (std::size_t i = 0; i < cumulative_.size(); ++i)
        if (cumulative_[i] >= 1)
            return start_ + static_cast<int>(i);
    return std::nullopt;
}

void MobilitySeries::set(MobilityCategory cat, Date d, double deviation_pp) {
    if (!(deviation_pp >= kMinDeviation && deviation_pp <= kMaxDeviation))
        fail("mobility series for " + country_ + ": deviation " + std::to_string(deviation_pp) +
             " on " + d.to_string() + " outside sanity band [-100, 500]");
    values_[static_cast<std::size_t>(cat)][d] = deviation_pp;
}

std::optional<double> MobilitySeries::value(MobilityCategory cat, Date d) const {
    const auto& m = values_[static_cast<std::size_t>(cat)];
    auto it = m.find(d);
    if (it == m.end())
        return std::nullopt;
    return it->second;
}

void CountryCovariates::validate() const {
    if (!valid_country_code(country))
        fail("covariates: country code '" + country + "' is not alpha-3");
    if (!(gdp_per_capita > 0))
        fail("covariates for " + country + ": gdp_per_capita must be positive");
    if (!(population > 0))
        fail("covariates for " + country + ": population must be positive");
    if (!(population_density > 0))
        fail("covariates for " + country + ": population_density must be positive");
    if (!(urbanization_rate >= 0 && urbanization_rate <= 100))
        fail("covariates for " + country + ": urbanization_rate outside [0, 100]");
}

} // namespace evpanel
