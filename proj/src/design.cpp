#include "evpanel/design.hpp"

#include "evpanel/error.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace evpanel {

std::string_view variant_name(SpecVariant v) {
    switch (v) {
    case SpecVariant::SingleEventDummy:
        return "eq1";
    case SpecVariant::MultiEventDummy:
        return "eq2";
    case SpecVariant::SingleEventIntensity:
        return "eq3-single";
    case SpecVariant::MultiEventIntensity:
        return "eq3";
    }
    return {};
}

std::optional<SpecVariant> parse_variant(std::string_view name) {
    if (name == "eq1")
        return SpecVariant::SingleEventDummy;
    if (name == "eq2")
        return SpecVariant::MultiEventDummy;
    if (name == "eq3-single")
        return SpecVariant::SingleEventIntensity;
    if (name == "eq3")
        return SpecVariant::MultiEventIntensity;
    return std::nullopt;
}

void EstimationSpec::validate() const {
    if (window_lo >= window_hi)
        fail("estimation spec: window_lo must be < window_hi");
    if (reference_event_time < window_lo || reference_event_time > window_hi)
        fail("estimation spec: reference event time outside the window");
}

std::string EstimationSpec::tag() const {
    return std::string(policy_name(policy)) + "_" + outcome.name() + "_" +
           std::string(variant_name(variant));
}

double s_pi(const Panel& panel, int country, PolicyKind policy, Date date,
            const EstimationSpec& spec) {
    auto j = event_time(panel, country, policy, date);
    if (!j)
        fail("s_pi: policy " + std::string(policy_name(policy)) + " never activates in " +
             panel.countries()[country]);
    if (*j < spec.window_lo || *j > spec.window_hi)
        return 0.0;
    if (*j >= 0)
        return static_cast<double>(panel.level_on(country, policy, date));
    // anticipation days carry the implementation-day level so the pre-period
    // design is not annihilated by the schedule's zeros
    return static_cast<double>(panel.implementation_level(country, policy));
}

namespace {

std::string event_label(int j) {
    return "event[j=" + std::to_string(j) + "]";
}
std::string conc_label(int j) {
    return "conc[j=" + std::to_string(j) + "]";
}

/// Reference level for a categorical family: the designated level when it is
/// observed in the sample, otherwise the smallest observed level.
int pick_reference(const std::set<int>& observed, int designated) {
    if (observed.count(designated))
        return designated;
    return *observed.begin();
}

} // namespace

DesignProblem build_design(const Panel& panel, const EstimationSpec& spec) {
    spec.validate();

    // per-country smoothed case series for the MA outcome
    std::vector<std::vector<double>> smoothed(panel.countries().size());
    if (spec.outcome.tag() == OutcomeKind::Tag::CasesIhsMa3) {
        for (std::size_t c = 0; c < panel.countries().size(); ++c) {
            auto [offset, count] = panel.row_span(static_cast<int>(c));
            std::vector<double> cases(count);
            for (std::size_t i = 0; i < count; ++i)
                cases[i] = static_cast<double>(panel.rows()[offset + i].new_cases);
            smoothed[c] = moving_average(cases, 3);
        }
    }

    // row selection pass: defined outcome, defined prevalence lag (if on)
    struct RowPick {
        std::size_t row;
        double outcome;
        double lnprev; // unused when the control is off
    };
    std::vector<RowPick> picks;
    picks.reserve(panel.rows().size());
    std::size_t dropped_missing_outcome = 0, dropped_missing_prevalence = 0;
    for (std::size_t i = 0; i < panel.rows().size(); ++i) {
        const PanelRow& row = panel.rows()[i];
        auto yv = outcome_value(row, spec.outcome, smoothed[row.country]);
        if (!yv) {
            ++dropped_missing_outcome;
            continue;
        }
        double lnprev = 0.0;
        if (spec.controls.prevalence_lag) {
            auto z = log_prevalence_lag(row);
            if (!z) {
                ++dropped_missing_prevalence;
                continue;
            }
            lnprev = *z;
        }
        picks.push_back({i, *yv, lnprev});
    }
    if (picks.empty())
        fail("build_design: empty sample after filtering (" +
             std::to_string(dropped_missing_outcome) + " rows lacked outcome " +
             spec.outcome.name() + ", " + std::to_string(dropped_missing_prevalence) +
             " rows lacked the lagged prevalence)");

    // event-time per picked row, and categorical levels observed in sample
    const int n = static_cast<int>(picks.size());
    std::vector<std::optional<int>> row_event_time(n);
    std::set<int> observed_t, observed_dow;
    std::set<int> observed_region;
    bool any_event_in_window = false;
    for (int i = 0; i < n; ++i) {
        const PanelRow& row = panel.rows()[picks[i].row];
        if (auto j = event_time(panel, row.country, spec.policy, row.date)) {
            row_event_time[i] = *j;
            if (*j >= spec.window_lo && *j <= spec.window_hi)
                any_event_in_window = true;
        }
        observed_t.insert(row.t);
        observed_dow.insert(row.day_of_week);
        observed_region.insert(static_cast<int>(panel.covariates(row.country).region));
    }
    if (!any_event_in_window)
        fail("build_design: no observed event time falls inside the window [" +
             std::to_string(spec.window_lo) + ", " + std::to_string(spec.window_hi) +
             "] for policy " + std::string(policy_name(spec.policy)));

    DesignProblem dp;
    dp.time_reference = spec.controls.time_dummies ? pick_reference(observed_t, 0) : 0;
    dp.dow_reference = spec.controls.day_of_week ? pick_reference(observed_dow, 0) : 0;
    dp.region_reference =
        spec.controls.region
            ? static_cast<Region>(pick_reference(observed_region, static_cast<int>(Region::Africa)))
            : Region::Africa;

    // column layout, in the term order of the estimating equation
    std::vector<int> event_js, conc_js;
    for (int j = spec.window_lo; j <= spec.window_hi; ++j)
        if (j != spec.reference_event_time)
            event_js.push_back(j);
    if (spec.multi_event())
        for (int j = spec.window_lo; j <= spec.window_hi; ++j)
            conc_js.push_back(j);

    std::vector<int> time_levels, dow_levels, region_levels;
    if (spec.controls.time_dummies)
        for (int t : observed_t)
            if (t != dp.time_reference)
                time_levels.push_back(t);
    if (spec.controls.day_of_week)
        for (int d : observed_dow)
            if (d != dp.dow_reference)
                dow_levels.push_back(d);
    if (spec.controls.region)
        for (int r : observed_region)
            if (r != static_cast<int>(dp.region_reference))
                region_levels.push_back(r);

    static constexpr std::array<std::string_view, 4> kCovariateLabels = {
        "ln_gdp_pc", "ln_population", "ln_pop_density", "urbanization"};

    int col = 0;
    for (int j : event_js) {
        dp.event_columns.emplace_back(j, col++);
        dp.column_labels.push_back(event_label(j));
        dp.column_info.push_back({ColumnFamily::Event, j});
    }
    for (int j : conc_js) {
        dp.concurrent_columns.emplace_back(j, col++);
        dp.column_labels.push_back(conc_label(j));
        dp.column_info.push_back({ColumnFamily::Concurrent, j});
    }
    const int time_base = col;
    for (int t : time_levels) {
        dp.column_labels.push_back("time[t=" + std::to_string(t) + "]");
        dp.column_info.push_back({ColumnFamily::Time, t});
        ++col;
    }
    const int dow_base = col;
    for (int d : dow_levels) {
        dp.column_labels.push_back("dow[" + std::to_string(d) + "]");
        dp.column_info.push_back({ColumnFamily::DayOfWeek, d});
        ++col;
    }
    const int region_base = col;
    for (int r : region_levels) {
        dp.column_labels.push_back("region[" + std::string(region_name(static_cast<Region>(r))) + "]");
        dp.column_info.push_back({ColumnFamily::Region, r});
        ++col;
    }
    const int prev_col = spec.controls.prevalence_lag ? col++ : -1;
    if (prev_col >= 0) {
        dp.column_labels.push_back("lnprev");
        dp.column_info.push_back({ColumnFamily::Prevalence, 0});
    }
    const int cov_base = spec.controls.covariates ? col : -1;
    if (spec.controls.covariates) {
        int k = 0;
        for (auto label : kCovariateLabels) {
            dp.column_labels.push_back("cov[" + std::string(label) + "]");
            dp.column_info.push_back({ColumnFamily::Covariate, k++});
            ++col;
        }
    }
    const int intercept_col = col++;
    dp.column_labels.push_back("intercept");
    dp.column_info.push_back({ColumnFamily::Intercept, 0});

    const int p = col;
    dp.y.resize(n);
    dp.x = Eigen::MatrixXd::Zero(n, p);
    dp.clusters.resize(n);
    dp.row_keys.resize(n);

    // level index lookups
    std::vector<int> time_col(observed_t.empty() ? 0 : *observed_t.rbegin() + 1, -1);
    for (std::size_t k = 0; k < time_levels.size(); ++k)
        time_col[time_levels[k]] = time_base + static_cast<int>(k);
    std::array<int, 7> dow_col;
    dow_col.fill(-1);
    for (std::size_t k = 0; k < dow_levels.size(); ++k)
        dow_col[dow_levels[k]] = dow_base + static_cast<int>(k);
    std::array<int, kRegionCount> region_col;
    region_col.fill(-1);
    for (std::size_t k = 0; k < region_levels.size(); ++k)
        region_col[region_levels[k]] = region_base + static_cast<int>(k);

    for (int i = 0; i < n; ++i) {
        const PanelRow& row = panel.rows()[picks[i].row];
        dp.y(i) = picks[i].outcome;
        dp.clusters[i] = row.country;
        dp.row_keys[i] = {row.country, row.date};

        if (auto j = row_event_time[i]; j && *j >= spec.window_lo && *j <= spec.window_hi) {
            if (*j != spec.reference_event_time) {
                const int c = dp.event_columns[*j - spec.window_lo -
                                               (*j > spec.reference_event_time ? 1 : 0)]
                                  .second;
                dp.x(i, c) = spec.intensity_weighted()
                                 ? s_pi(panel, row.country, spec.policy, row.date, spec)
                                 : 1.0;
            }
            if (spec.multi_event()) {
                const int c = dp.concurrent_columns[*j - spec.window_lo].second;
                const double mean_other =
                    concurrent_mean_intensity(panel, row.country, spec.policy, row.date);
                dp.x(i, c) = spec.intensity_weighted() ? mean_other : (mean_other > 0 ? 1.0 : 0.0);
            }
        }

        if (spec.controls.time_dummies && time_col[row.t] >= 0)
            dp.x(i, time_col[row.t]) = 1.0;
        if (spec.controls.day_of_week && dow_col[row.day_of_week] >= 0)
            dp.x(i, dow_col[row.day_of_week]) = 1.0;
        if (spec.controls.region) {
            const int r = static_cast<int>(panel.covariates(row.country).region);
            if (region_col[r] >= 0)
                dp.x(i, region_col[r]) = 1.0;
        }
        if (prev_col >= 0)
            dp.x(i, prev_col) = picks[i].lnprev;
        if (cov_base >= 0) {
            const CountryCovariates& cov = panel.covariates(row.country);
            dp.x(i, cov_base + 0) = std::log(cov.gdp_per_capita);
            dp.x(i, cov_base + 1) = std::log(cov.population);
            dp.x(i, cov_base + 2) = std::log(cov.population_density);
            dp.x(i, cov_base + 3) = cov.urbanization_rate;
        }
        dp.x(i, intercept_col) = 1.0;
    }

    if (!dp.x.allFinite() || !dp.y.allFinite())
        fail("build_design: non-finite value in the assembled design");
    return dp;
}

} // namespace evpanel
