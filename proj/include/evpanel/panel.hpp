#pragma once

#include "evpanel/series.hpp"

#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace evpanel {

/// One country-day observation. `t` counts days since the country's first
/// confirmed case; intensities are the schedule levels on that calendar day.
struct PanelRow {
    int country = 0; // index into Panel::countries()
    Date date;
    int t = 0;
    int day_of_week = 0; // 0 = Monday
    std::int64_t new_cases = 0;
    std::int64_t cumulative_lag1 = 0;
    std::array<int, kPolicyCount> intensity{};
    std::array<std::optional<double>, kMobilityCategoryCount> mobility{};
};

/// Aligned country x day panel. Immutable once built; rows are grouped by
/// country and contiguous in date from the first confirmed case to the last
/// ingested day, so (country, date) lookups are O(1).
class Panel {
public:
    const std::vector<std::string>& countries() const { return countries_; }
    const std::vector<CountryCovariates>& covariates() const { return covariates_; }
    const CountryCovariates& covariates(int country) const { return covariates_[country]; }
    const std::vector<PanelRow>& rows() const { return rows_; }

    std::optional<int> country_index(std::string_view code) const;
    Date first_case_date(int country) const { return first_case_[country]; }

    /// Row span of one country: [offset, offset + count).
    std::pair<std::size_t, std::size_t> row_span(int country) const {
        return {row_offset_[country], row_count_[country]};
    }

    /// Row lookup by (country, date); nullptr outside the observed range.
    const PanelRow* row(int country, Date d) const;

    const PolicySchedule& schedule(int country, PolicyKind p) const {
        return schedules_[country * kPolicyCount + static_cast<int>(p)];
    }
    std::optional<Date> implementation_date(int country, PolicyKind p) const {
        return schedule(country, p).implementation_date();
    }
    int implementation_level(int country, PolicyKind p) const {
        return schedule(country, p).implementation_level();
    }
    int level_on(int country, PolicyKind p, Date d) const {
        return schedule(country, p).level_on(d);
    }

private:
    friend Panel build_panel(std::span<const PolicySchedule>, std::span<const EpiSeries>,
                             std::span<const MobilitySeries>, std::span<const CountryCovariates>);

    std::vector<std::string> countries_;
    std::vector<CountryCovariates> covariates_;
    std::vector<Date> first_case_;
    std::vector<std::size_t> row_offset_;
    std::vector<std::size_t> row_count_;
    std::vector<PanelRow> rows_;
    std::vector<PolicySchedule> schedules_; // country * 8 + policy
};

/// Assembles the aligned panel. Countries are indexed in sorted code order;
/// countries whose series never record a case are omitted. Missing schedules
/// mean intensity 0 everywhere; missing mobility stays missing.
Panel build_panel(std::span<const PolicySchedule> schedules, std::span<const EpiSeries> epi,
                  std::span<const MobilitySeries> mobility,
                  std::span<const CountryCovariates> covariates);

/// The four source collections a panel is built from; also the unit the
/// canonical file formats serialize.
struct PanelSources {
    std::vector<PolicySchedule> schedules;
    std::vector<EpiSeries> epi;
    std::vector<MobilitySeries> mobility;
    std::vector<CountryCovariates> covariates;
};

inline Panel build_panel(const PanelSources& s) {
    return build_panel(s.schedules, s.epi, s.mobility, s.covariates);
}

/// Days since the policy's implementation day; nullopt when the policy never
/// activates in that country. Negative values are anticipation days.
std::optional<int> event_time(const Panel& panel, int country, PolicyKind policy, Date date);

/// Mean intensity of the *other* seven policies that are strictly positive on
/// that date; 0 when none is active.
double concurrent_mean_intensity(const Panel& panel, int country, PolicyKind policy, Date date);

} // namespace evpanel
