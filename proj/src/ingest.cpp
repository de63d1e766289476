#include "evpanel/ingest.hpp"

#include "evpanel/error.hpp"
#include "evpanel/format.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace evpanel {

namespace {

/// Line-oriented reader for the canonical comma-separated files. The formats
/// never quote fields, so a plain split is the whole grammar.
class CsvReader {
public:
    CsvReader(const std::filesystem::path& path, std::string_view expected_header)
        : path_(path.string()), in_(path) {
        if (!in_)
            fail(path_ + ": cannot open file");
        std::string header;
        if (!std::getline(in_, header))
            fail(path_ + ": missing header row");
        if (!header.empty() && header.back() == '\r')
            header.pop_back();
        if (header != expected_header)
            fail(path_ + ": expected header '" + std::string(expected_header) + "', found '" +
                 header + "'");
        line_number_ = 1;
    }

    /// Next data row split into exactly `n_fields` fields; false at EOF.
    bool next(std::vector<std::string>& fields, std::size_t n_fields) {
        std::string line;
        while (std::getline(in_, line)) {
            ++line_number_;
            if (!line.empty() && line.back() == '\r')
                line.pop_back();
            if (line.empty())
                continue;
            fields.clear();
            std::size_t start = 0;
            while (true) {
                const std::size_t comma = line.find(',', start);
                fields.push_back(line.substr(start, comma - start));
                if (comma == std::string::npos)
                    break;
                start = comma + 1;
            }
            if (fields.size() != n_fields)
                error("expected " + std::to_string(n_fields) + " fields, found " +
                      std::to_string(fields.size()));
            return true;
        }
        return false;
    }

    [[noreturn]] void error(const std::string& what) const {
        fail(path_ + ":" + std::to_string(line_number_) + ": " + what);
    }

    std::string context() const { return path_ + ":" + std::to_string(line_number_); }

private:
    std::string path_;
    std::ifstream in_;
    std::size_t line_number_ = 0;
};

std::string check_country(const CsvReader& r, const std::string& code) {
    if (!valid_country_code(code))
        fail(r.context() + ": country code '" + code + "' is not alpha-3");
    return code;
}

std::int64_t parse_int(const CsvReader& r, const std::string& s, const char* what) {
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size())
        fail(r.context() + ": invalid " + what + " '" + s + "'");
    return v;
}

double parse_real(const CsvReader& r, const std::string& s, const char* what) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || s.empty())
        fail(r.context() + ": invalid " + what + " '" + s + "'");
    return v;
}

} // namespace

std::vector<PolicySchedule> parse_policies(const std::filesystem::path& path) {
    CsvReader r(path, "country_iso3,policy,date,intensity");
    std::map<std::pair<std::string, PolicyKind>, std::map<Date, int>> levels;
    std::vector<std::string> f;
    while (r.next(f, 4)) {
        const std::string country = check_country(r, f[0]);
        auto policy = parse_policy(f[1]);
        if (!policy)
            r.error("unknown policy name '" + f[1] + "'");
        const Date date = Date::parse_or_fail(f[2], r.context());
        const std::int64_t intensity = parse_int(r, f[3], "intensity");
        if (!valid_intensity(static_cast<int>(intensity)))
            r.error("intensity " + f[3] + " outside [0, 6]");
        auto [it, inserted] =
            levels[{country, *policy}].emplace(date, static_cast<int>(intensity));
        if (!inserted)
            r.error("duplicate (country, policy, date) entry");
    }
    std::vector<PolicySchedule> out;
    out.reserve(levels.size());
    for (auto& [key, entries] : levels)
        out.emplace_back(key.first, key.second, std::move(entries));
    return out;
}

std::vector<EpiSeries> parse_cases(const std::filesystem::path& path) {
    CsvReader r(path, "country_iso3,date,new_cases");
    std::map<std::string, std::map<Date, std::int64_t>> daily;
    std::vector<std::string> f;
    while (r.next(f, 3)) {
        const std::string country = check_country(r, f[0]);
        const Date date = Date::parse_or_fail(f[1], r.context());
        const std::int64_t count = parse_int(r, f[2], "new-case count");
        if (count < 0)
            r.error("negative new-case count");
        if (!daily[country].emplace(date, count).second)
            r.error("duplicate (country, date) entry for " + country);
    }
    std::vector<EpiSeries> out;
    out.reserve(daily.size());
    for (const auto& [country, days] : daily)
        out.push_back(EpiSeries::from_daily_new_cases(country, days));
    return out;
}

std::vector<MobilitySeries> parse_mobility(const std::filesystem::path& path) {
    CsvReader r(path, "country_iso3,date,category,deviation_pp");
    std::map<std::string, MobilitySeries> series;
    std::vector<std::string> f;
    while (r.next(f, 4)) {
        const std::string country = check_country(r, f[0]);
        const Date date = Date::parse_or_fail(f[1], r.context());
        auto category = parse_mobility_category(f[2]);
        if (!category)
            r.error("unknown mobility category '" + f[2] + "'");
        const double deviation = parse_real(r, f[3], "deviation");
        if (deviation < MobilitySeries::kMinDeviation || deviation > MobilitySeries::kMaxDeviation)
            r.error("deviation " + f[3] + " outside sanity band [-100, 500]");
        auto it = series.try_emplace(country, MobilitySeries(country)).first;
        if (it->second.value(*category, date))
            r.error("duplicate (country, date, category) entry");
        it->second.set(*category, date, deviation);
    }
    std::vector<MobilitySeries> out;
    out.reserve(series.size());
    for (auto& [country, s] : series)
        out.push_back(std::move(s));
    return out;
}

std::vector<CountryCovariates> parse_covariates(const std::filesystem::path& path) {
    CsvReader r(path,
                "country_iso3,region,gdp_per_capita,population,population_density,urbanization_rate");
    std::vector<CountryCovariates> out;
    std::set<std::string> seen;
    std::vector<std::string> f;
    while (r.next(f, 6)) {
        CountryCovariates cov;
        cov.country = check_country(r, f[0]);
        if (!seen.insert(cov.country).second)
            r.error("duplicate covariates row for " + cov.country);
        auto region = parse_region(f[1]);
        if (!region)
            r.error("unknown region name '" + f[1] + "'");
        cov.region = *region;
        cov.gdp_per_capita = parse_real(r, f[2], "gdp_per_capita");
        cov.population = parse_real(r, f[3], "population");
        cov.population_density = parse_real(r, f[4], "population_density");
        cov.urbanization_rate = parse_real(r, f[5], "urbanization_rate");
        try {
            cov.validate();
        } catch (const Error& e) {
            r.error(e.what());
        }
        out.push_back(std::move(cov));
    }
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return a.country < b.country; });
    return out;
}

PanelSources load_canonical(const CanonicalPaths& paths) {
    PanelSources s;
    s.schedules = parse_policies(paths.policies);
    s.epi = parse_cases(paths.cases);
    s.mobility = parse_mobility(paths.mobility);
    s.covariates = parse_covariates(paths.covariates);
    return s;
}

void write_canonical(const PanelSources& sources, const CanonicalPaths& paths) {
    auto open = [](const std::filesystem::path& p) {
        std::ofstream out(p);
        if (!out)
            fail(p.string() + ": cannot open for writing");
        return out;
    };

    {
        std::ofstream out = open(paths.policies);
        out << "country_iso3,policy,date,intensity\n";
        std::vector<const PolicySchedule*> ordered;
        for (const auto& s : sources.schedules)
            ordered.push_back(&s);
        std::sort(ordered.begin(), ordered.end(), [](const auto* a, const auto* b) {
            return std::make_tuple(a->country(), a->policy()) <
                   std::make_tuple(b->country(), b->policy());
        });
        for (const auto* s : ordered)
            for (const auto& [date, level] : s->entries())
                out << s->country() << ',' << policy_name(s->policy()) << ',' << date.to_string()
                    << ',' << level << '\n';
    }
    {
        std::ofstream out = open(paths.cases);
        out << "country_iso3,date,new_cases\n";
        std::vector<const EpiSeries*> ordered;
        for (const auto& s : sources.epi)
            ordered.push_back(&s);
        std::sort(ordered.begin(), ordered.end(),
                  [](const auto* a, const auto* b) { return a->country() < b->country(); });
        for (const auto* s : ordered)
            for (Date d = s->start_date(); d <= s->last_date(); d = d + 1)
                out << s->country() << ',' << d.to_string() << ',' << s->new_cases_at(d) << '\n';
    }
    {
        std::ofstream out = open(paths.mobility);
        out << "country_iso3,date,category,deviation_pp\n";
        std::vector<const MobilitySeries*> ordered;
        for (const auto& s : sources.mobility)
            ordered.push_back(&s);
        std::sort(ordered.begin(), ordered.end(),
                  [](const auto* a, const auto* b) { return a->country() < b->country(); });
        for (const auto* s : ordered)
            for (MobilityCategory cat : kAllMobilityCategories)
                for (const auto& [date, value] : s->values(cat))
                    out << s->country() << ',' << date.to_string() << ','
                        << mobility_category_name(cat) << ',' << format_real(value) << '\n';
    }
    {
        std::ofstream out = open(paths.covariates);
        out << "country_iso3,region,gdp_per_capita,population,population_density,urbanization_rate\n";
        std::vector<const CountryCovariates*> ordered;
        for (const auto& c : sources.covariates)
            ordered.push_back(&c);
        std::sort(ordered.begin(), ordered.end(),
                  [](const auto* a, const auto* b) { return a->country < b->country; });
        for (const auto* c : ordered)
            out << c->country << ',' << region_name(c->region) << ','
                << format_real(c->gdp_per_capita) << ',' << format_real(c->population) << ','
                << format_real(c->population_density) << ',' << format_real(c->urbanization_rate)
                << '\n';
    }
}

} // namespace evpanel
