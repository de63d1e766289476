#include "evpanel/transforms.hpp"

#include "evpanel/error.hpp"

#include <cmath>

namespace evpanel {

std::string OutcomeKind::name() const {
    switch (tag_) {
    case Tag::CasesIhsMa3:
        return "cases_ihs_ma3";
    case Tag::CasesIhs:
        return "cases_ihs";
    case Tag::MobilityDeviation:
        return "mobility_" + std::string(mobility_category_name(category_));
    }
    return {};
}

std::optional<OutcomeKind> OutcomeKind::parse(std::string_view name) {
    if (name == "cases_ihs_ma3")
        return cases_ihs_ma3();
    if (name == "cases_ihs")
        return cases_ihs();
    constexpr std::string_view prefix = "mobility_";
    if (name.substr(0, prefix.size()) == prefix)
        if (auto cat = parse_mobility_category(name.substr(prefix.size())))
            return mobility(*cat);
    return std::nullopt;
}

double ihs(double x) {
    if (!std::isfinite(x))
        fail("ihs: non-finite input");
    return std::asinh(x);
}

std::vector<double> moving_average(std::span<const double> series, int window) {
    if (window < 1)
        fail("moving_average: window must be >= 1");
    if (series.empty())
        fail("moving_average: empty series");
    std::vector<double> out(series.size());
    for (std::size_t i = 0; i < series.size(); ++i) {
        const auto width = std::min<std::size_t>(window, i + 1);
        double sum = 0.0;
        for (std::size_t k = i + 1 - width; k <= i; ++k)
            sum += series[k];
        out[i] = sum / static_cast<double>(width);
    }
    return out;
}

std::optional<double> log_prevalence_lag(const PanelRow& row) {
    if (row.t == 0 || row.cumulative_lag1 < 1)
        return std::nullopt;
    return std::log(static_cast<double>(row.cumulative_lag1));
}

std::optional<double> outcome_value(const PanelRow& row, OutcomeKind kind,
                                    std::span<const double> smoothed_cases) {
    switch (kind.tag()) {
    case OutcomeKind::Tag::CasesIhsMa3:
        if (row.t < 0 || row.t >= static_cast<int>(smoothed_cases.size()))
            fail("outcome_value: smoothed series does not cover t=" + std::to_string(row.t));
        return ihs(smoothed_cases[row.t]);
    case OutcomeKind::Tag::CasesIhs:
        return ihs(static_cast<double>(row.new_cases));
    case OutcomeKind::Tag::MobilityDeviation:
        return row.mobility[static_cast<std::size_t>(kind.category())];
    }
    return std::nullopt;
}

} // namespace evpanel
