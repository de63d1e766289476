#include "evpanel/panel.hpp"

#include "evpanel/error.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace evpanel {

std::optional<int> Panel::country_index(std::string_view code) const {
    auto it = std::lower_bound(countries_.begin(), countries_.end(), code);
    if (it == countries_.end() || *it != code)
        return std::nullopt;
    return static_cast<int>(it - countries_.begin());
}

const PanelRow* Panel::row(int country, Date d) const {
    const int i = d - first_case_[country];
    if (i < 0 || i >= static_cast<int>(row_count_[country]))
        return nullptr;
    return &rows_[row_offset_[country] + i];
}

Panel build_panel(std::span<const PolicySchedule> schedules, std::span<const EpiSeries> epi,
                  std::span<const MobilitySeries> mobility,
                  std::span<const CountryCovariates> covariates) {
    std::map<std::string, const EpiSeries*> epi_by_country;
    for (const auto& s : epi)
        if (!epi_by_country.emplace(s.country(), &s).second)
            fail("build_panel: duplicate case series for country " + s.country());

    std::map<std::string, const CountryCovariates*> cov_by_country;
    for (const auto& c : covariates) {
        c.validate();
        if (!cov_by_country.emplace(c.country, &c).second)
            fail("build_panel: duplicate covariates for country " + c.country);
    }

    std::map<std::string, const MobilitySeries*> mob_by_country;
    for (const auto& m : mobility)
        if (!mob_by_country.emplace(m.country(), &m).second)
            fail("build_panel: duplicate mobility series for country " + m.country());

    std::map<std::pair<std::string, PolicyKind>, const PolicySchedule*> sched_by_key;
    for (const auto& s : schedules)
        if (!sched_by_key.emplace(std::make_pair(s.country(), s.policy()), &s).second)
            fail("build_panel: duplicate schedule for (" + s.country() + ", " +
                 std::string(policy_name(s.policy())) + ")");

    Panel p;
    for (const auto& [code, series] : epi_by_country) {
        auto cov = cov_by_country.find(code);
        if (cov == cov_by_country.end())
            fail("build_panel: country " + code + " has case data but no covariates");
        auto first_case = series->first_case_date();
        if (!first_case)
            continue; // never recorded a case; contributes no rows
        const int c = static_cast<int>(p.countries_.size());
        p.countries_.push_back(code);
        p.covariates_.push_back(*cov->second);
        p.first_case_.push_back(*first_case);

        for (PolicyKind kind : kAllPolicies) {
            auto it = sched_by_key.find(std::make_pair(code, kind));
            p.schedules_.push_back(it != sched_by_key.end() ? *it->second
                                                            : PolicySchedule(code, kind, {}));
        }

        const MobilitySeries* mob =
            mob_by_country.count(code) ? mob_by_country.at(code) : nullptr;

        const int n_days = series->last_date() - *first_case + 1;
        p.row_offset_.push_back(p.rows_.size());
        p.row_count_.push_back(static_cast<std::size_t>(n_days));
        for (int t = 0; t < n_days; ++t) {
            const Date d = *first_case + t;
            PanelRow row;
            row.country = c;
            row.date = d;
            row.t = t;
            row.day_of_week = d.day_of_week();
            row.new_cases = series->new_cases_at(d);
            row.cumulative_lag1 = series->cumulative_at(d - 1);
            for (PolicyKind kind : kAllPolicies)
                row.intensity[static_cast<std::size_t>(kind)] = p.level_on(c, kind, d);
            if (mob)
                for (MobilityCategory cat : kAllMobilityCategories)
                    row.mobility[static_cast<std::size_t>(cat)] = mob->value(cat, d);
            p.rows_.push_back(std::move(row));
        }
    }
    if (p.rows_.empty())
        fail("build_panel: no country has an observed first case");
    return p;
}

std::optional<int> event_time(const Panel& panel, int country, PolicyKind policy, Date date) {
    auto impl = panel.implementation_date(country, policy);
    if (!impl)
        return std::nullopt;
    return date - *impl;
}

double concurrent_mean_intensity(const Panel& panel, int country, PolicyKind policy, Date date) {
    double sum = 0.0;
    int active = 0;
    for (PolicyKind other : kAllPolicies) {
        if (other == policy)
            continue;
        const int level = panel.level_on(country, other, date);
        if (level > 0) {
            sum += level;
            ++active;
        }
    }
    return active == 0 ? 0.0 : sum / active;
}

} // namespace evpanel
