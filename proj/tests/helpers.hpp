#pragma once

// Shared fixtures and comparison helpers for the test suites.

#include "evpanel/panel.hpp"

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <map>
#include <string>

#include <unistd.h>

namespace evpanel::testing {

inline bool rows_identical(const PanelRow& a, const PanelRow& b) {
    if (a.country != b.country || a.date != b.date || a.t != b.t ||
        a.day_of_week != b.day_of_week || a.new_cases != b.new_cases ||
        a.cumulative_lag1 != b.cumulative_lag1 || a.intensity != b.intensity)
        return false;
    for (std::size_t k = 0; k < a.mobility.size(); ++k) {
        if (a.mobility[k].has_value() != b.mobility[k].has_value())
            return false;
        if (a.mobility[k] && *a.mobility[k] != *b.mobility[k]) // bit-equal doubles
            return false;
    }
    return true;
}

/// Bit-level equality of two panels: countries, covariates, rows, schedules.
inline bool panels_identical(const Panel& a, const Panel& b) {
    if (a.countries() != b.countries() || a.rows().size() != b.rows().size())
        return false;
    for (std::size_t c = 0; c < a.countries().size(); ++c) {
        const auto& ca = a.covariates(static_cast<int>(c));
        const auto& cb = b.covariates(static_cast<int>(c));
        if (ca.country != cb.country || ca.region != cb.region ||
            ca.gdp_per_capita != cb.gdp_per_capita || ca.population != cb.population ||
            ca.population_density != cb.population_density ||
            ca.urbanization_rate != cb.urbanization_rate)
            return false;
        if (a.first_case_date(static_cast<int>(c)) != b.first_case_date(static_cast<int>(c)))
            return false;
        for (PolicyKind p : kAllPolicies)
            if (a.schedule(static_cast<int>(c), p).entries() !=
                b.schedule(static_cast<int>(c), p).entries())
                return false;
    }
    for (std::size_t i = 0; i < a.rows().size(); ++i)
        if (!rows_identical(a.rows()[i], b.rows()[i]))
            return false;
    return true;
}

/// Fresh scratch directory under the system temp root.
inline std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() /
               ("evpanel_test_" + name + "_" + std::to_string(::getpid()));
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace evpanel::testing
