#include "evpanel/ingest.hpp"

#include "evpanel/error.hpp"
#include "evpanel/simgen.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>

using namespace evpanel;

namespace {

std::filesystem::path write_tmp(const std::filesystem::path& dir, const std::string& name,
                                const std::string& content) {
    const auto path = dir / name;
    std::ofstream out(path);
    out << content;
    return path;
}

/// Shuffle the data rows of a CSV file in place, keeping the header first.
void shuffle_rows(const std::filesystem::path& path, unsigned seed) {
    std::ifstream in(path);
    std::string header, line;
    std::getline(in, header);
    std::vector<std::string> rows;
    while (std::getline(in, line))
        if (!line.empty())
            rows.push_back(line);
    in.close();
    std::shuffle(rows.begin(), rows.end(), std::mt19937(seed));
    std::ofstream out(path);
    out << header << '\n';
    for (const auto& r : rows)
        out << r << '\n';
}

} // namespace

TEST_CASE("parse_policies carries levels forward and defaults to zero") {
    const auto dir = testing::scratch_dir("policies");
    const auto path = write_tmp(dir, "policies.csv",
                                "country_iso3,policy,date,intensity\n"
                                "XXA,school_closure,2020-03-10,4\n"
                                "XXA,school_closure,2020-03-20,6\n");
    const auto schedules = parse_policies(path);
    REQUIRE(schedules.size() == 1);
    const PolicySchedule& s = schedules.front();
    CHECK(s.level_on(*Date::parse("2020-03-15")) == 4);
    CHECK(s.level_on(*Date::parse("2020-03-20")) == 6);
    CHECK(s.level_on(*Date::parse("2020-03-09")) == 0);
    std::filesystem::remove_all(dir);
}

TEST_CASE("parse_policies rejects bad rows with line numbers") {
    const auto dir = testing::scratch_dir("policies_bad");
    const auto bad_intensity = write_tmp(dir, "a.csv",
                                         "country_iso3,policy,date,intensity\n"
                                         "XXA,school_closure,2020-03-10,4\n"
                                         "XXA,school_closure,2020-03-11,7\n");
    CHECK_THROWS_WITH_AS(parse_policies(bad_intensity), doctest::Contains(":3:"), Error);

    const auto bad_policy = write_tmp(dir, "b.csv",
                                      "country_iso3,policy,date,intensity\n"
                                      "XXA,curfew,2020-03-10,4\n");
    CHECK_THROWS_WITH_AS(parse_policies(bad_policy), doctest::Contains("unknown policy"), Error);

    const auto bad_date = write_tmp(dir, "c.csv",
                                    "country_iso3,policy,date,intensity\n"
                                    "XXA,school_closure,03/10/2020,4\n");
    CHECK_THROWS_WITH_AS(parse_policies(bad_date), doctest::Contains("unparseable date"), Error);

    const auto bad_header = write_tmp(dir, "d.csv", "country,policy,date,level\nXXA,x,y,1\n");
    CHECK_THROWS_WITH_AS(parse_policies(bad_header), doctest::Contains("header"), Error);
    std::filesystem::remove_all(dir);
}

TEST_CASE("parse_cases computes cumulative sums and flags errors") {
    const auto dir = testing::scratch_dir("cases");
    const auto path = write_tmp(dir, "cases.csv",
                                "country_iso3,date,new_cases\n"
                                "XXA,2020-03-01,1\n"
                                "XXA,2020-03-02,0\n"
                                "XXA,2020-03-03,2\n");
    const auto series = parse_cases(path);
    REQUIRE(series.size() == 1);
    CHECK(series.front().cumulative_at(*Date::parse("2020-03-01")) == 1);
    CHECK(series.front().cumulative_at(*Date::parse("2020-03-02")) == 1);
    CHECK(series.front().cumulative_at(*Date::parse("2020-03-03")) == 3);

    const auto negative = write_tmp(dir, "neg.csv",
                                    "country_iso3,date,new_cases\n"
                                    "XXA,2020-03-01,-2\n");
    CHECK_THROWS_WITH_AS(parse_cases(negative), doctest::Contains("negative"), Error);

    const auto dup = write_tmp(dir, "dup.csv",
                               "country_iso3,date,new_cases\n"
                               "XXA,2020-03-01,1\n"
                               "XXA,2020-03-01,2\n");
    CHECK_THROWS_WITH_AS(parse_cases(dup), doctest::Contains("duplicate"), Error);
    std::filesystem::remove_all(dir);
}

TEST_CASE("parse_mobility keeps missing days missing and bounds deviations") {
    const auto dir = testing::scratch_dir("mobility");
    const auto path = write_tmp(dir, "mobility.csv",
                                "country_iso3,date,category,deviation_pp\n"
                                "XXA,2020-03-01,transit_stations,-40.0\n"
                                "XXA,2020-03-03,transit_stations,-42.5\n");
    const auto series = parse_mobility(path);
    REQUIRE(series.size() == 1);
    CHECK(*series.front().value(MobilityCategory::TransitStations, *Date::parse("2020-03-01")) ==
          -40.0);
    CHECK(!series.front()
               .value(MobilityCategory::TransitStations, *Date::parse("2020-03-02"))
               .has_value());

    const auto bad_cat = write_tmp(dir, "cat.csv",
                                   "country_iso3,date,category,deviation_pp\n"
                                   "XXA,2020-03-01,malls,-10\n");
    CHECK_THROWS_WITH_AS(parse_mobility(bad_cat), doctest::Contains("unknown mobility category"),
                         Error);

    const auto out_of_band = write_tmp(dir, "band.csv",
                                       "country_iso3,date,category,deviation_pp\n"
                                       "XXA,2020-03-01,parks,700\n");
    CHECK_THROWS_WITH_AS(parse_mobility(out_of_band), doctest::Contains("sanity band"), Error);
    std::filesystem::remove_all(dir);
}

TEST_CASE("parse_covariates accepts canonical regions and validates bounds") {
    const auto dir = testing::scratch_dir("covariates");
    const auto path = write_tmp(
        dir, "cov.csv",
        "country_iso3,region,gdp_per_capita,population,population_density,urbanization_rate\n"
        "XXA,MiddleEast,25000,1e7,120,80\n"
        "XXB,Europe,45000,5e6,200,75\n");
    const auto covs = parse_covariates(path);
    REQUIRE(covs.size() == 2);
    CHECK(covs[0].region == Region::MiddleEast);

    const auto bad_region = write_tmp(
        dir, "r.csv",
        "country_iso3,region,gdp_per_capita,population,population_density,urbanization_rate\n"
        "XXA,Antarctica,25000,1e7,120,80\n");
    CHECK_THROWS_WITH_AS(parse_covariates(bad_region), doctest::Contains("unknown region"), Error);

    const auto bad_urban = write_tmp(
        dir, "u.csv",
        "country_iso3,region,gdp_per_capita,population,population_density,urbanization_rate\n"
        "XXA,Europe,25000,1e7,120,101\n");
    CHECK_THROWS_WITH_AS(parse_covariates(bad_urban), doctest::Contains("urbanization"), Error);

    const auto zero_gdp = write_tmp(
        dir, "g.csv",
        "country_iso3,region,gdp_per_capita,population,population_density,urbanization_rate\n"
        "XXA,Europe,0,1e7,120,80\n");
    CHECK_THROWS_WITH_AS(parse_covariates(zero_gdp), doctest::Contains("gdp"), Error);
    std::filesystem::remove_all(dir);
}

TEST_CASE("country codes must be alpha-3 everywhere") {
    const auto dir = testing::scratch_dir("codes");
    const auto path = write_tmp(dir, "cases.csv",
                                "country_iso3,date,new_cases\n"
                                "xxa,2020-03-01,1\n");
    CHECK_THROWS_WITH_AS(parse_cases(path), doctest::Contains("alpha-3"), Error);
    std::filesystem::remove_all(dir);
}

namespace {

LinearDgpConfig roundtrip_config() {
    LinearDgpConfig cfg;
    cfg.n_countries = 8;
    cfg.n_days = 50;
    cfg.window_lo = -8;
    cfg.window_hi = 12;
    cfg.reference = -8;
    cfg.noise_sd = 0.3; // exercise full doubles in the mobility file
    cfg.seed = 99;
    for (PolicyKind p : kAllPolicies) {
        auto& rule = cfg.timing[static_cast<std::size_t>(p)];
        rule.impl_lo = 10;
        rule.impl_hi = 35;
    }
    return cfg;
}

} // namespace

TEST_CASE("round trip: export then ingest reproduces an identical panel") {
    const LinearSimResult sim = simulate_linear_panel(roundtrip_config());
    const auto dir = testing::scratch_dir("roundtrip");
    const auto paths = CanonicalPaths::in_dir(dir);
    write_canonical(sim.sources, paths);
    const Panel reloaded = build_panel(load_canonical(paths));
    CHECK(testing::panels_identical(sim.panel, reloaded));
    std::filesystem::remove_all(dir);
}

TEST_CASE("parsing is order independent") {
    const LinearSimResult sim = simulate_linear_panel(roundtrip_config());
    const auto dir = testing::scratch_dir("shuffled");
    const auto paths = CanonicalPaths::in_dir(dir);
    write_canonical(sim.sources, paths);
    shuffle_rows(paths.policies, 1);
    shuffle_rows(paths.cases, 2);
    shuffle_rows(paths.mobility, 3);
    shuffle_rows(paths.covariates, 4);
    const Panel reloaded = build_panel(load_canonical(paths));
    CHECK(testing::panels_identical(sim.panel, reloaded));
    std::filesystem::remove_all(dir);
}
