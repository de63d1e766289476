#pragma once

#include "evpanel/panel.hpp"

#include <filesystem>
#include <vector>

namespace evpanel {

/// Paths of the four canonical comma-separated files. All are UTF-8 with a
/// mandatory header row, ISO-8601 dates, and alpha-3 country codes.
struct CanonicalPaths {
    std::filesystem::path policies;
    std::filesystem::path cases;
    std::filesystem::path mobility;
    std::filesystem::path covariates;

    static CanonicalPaths in_dir(const std::filesystem::path& dir) {
        return {dir / "policies.csv", dir / "cases.csv", dir / "mobility.csv",
                dir / "covariates.csv"};
    }
};

/// Header `country_iso3,policy,date,intensity`. Listed rows are change
/// points: levels carry forward between listed dates and are 0 before the
/// first one. Errors carry the offending line number.
std::vector<PolicySchedule> parse_policies(const std::filesystem::path& path);

/// Header `country_iso3,date,new_cases`. Missing intermediate dates count as
/// zero new cases; cumulative counts are prefix sums from the earliest date.
std::vector<EpiSeries> parse_cases(const std::filesystem::path& path);

/// Header `country_iso3,date,category,deviation_pp`. Missing triples stay
/// missing.
std::vector<MobilitySeries> parse_mobility(const std::filesystem::path& path);

/// Header `country_iso3,region,gdp_per_capita,population,population_density,urbanization_rate`.
std::vector<CountryCovariates> parse_covariates(const std::filesystem::path& path);

/// Parses all four files.
PanelSources load_canonical(const CanonicalPaths& paths);

/// Writes the four canonical files. Real values are printed with enough
/// digits to round-trip bit-exactly.
void write_canonical(const PanelSources& sources, const CanonicalPaths& paths);

} // namespace evpanel
