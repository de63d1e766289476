#pragma once

#include "evpanel/panel.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace evpanel {

/// Outcome variable selector: ihs of smoothed cases (main), ihs of raw cases
/// (appendix variant), or one mobility category as a raw percentage-point
/// deviation.
class OutcomeKind {
public:
    enum class Tag { CasesIhsMa3, CasesIhs, MobilityDeviation };

    static OutcomeKind cases_ihs_ma3() { return OutcomeKind(Tag::CasesIhsMa3, {}); }
    static OutcomeKind cases_ihs() { return OutcomeKind(Tag::CasesIhs, {}); }
    static OutcomeKind mobility(MobilityCategory c) { return OutcomeKind(Tag::MobilityDeviation, c); }

    Tag tag() const { return tag_; }
    bool is_cases() const { return tag_ != Tag::MobilityDeviation; }
    MobilityCategory category() const { return category_; }

    std::string name() const;
    static std::optional<OutcomeKind> parse(std::string_view name);

    friend bool operator==(const OutcomeKind&, const OutcomeKind&) = default;

private:
    OutcomeKind(Tag t, MobilityCategory c) : tag_(t), category_(c) {}
    Tag tag_;
    MobilityCategory category_;
};

/// Inverse hyperbolic sine, ln(x + sqrt(x^2 + 1)). Defined at 0, odd,
/// log-like for large |x|. Throws on non-finite input.
double ihs(double x);

/// Trailing moving average with partial windows at the series start: output
/// at position i is the mean of the last min(window, i + 1) values. Output
/// length equals input length. Throws when window < 1 or the series is empty.
std::vector<double> moving_average(std::span<const double> series, int window);

/// ln of cumulative cases at t-1; nullopt at t = 0 or when the lagged
/// cumulative count is still 0 (the row is then excluded from estimation).
std::optional<double> log_prevalence_lag(const PanelRow& row);

/// Outcome value for one row. `smoothed_cases` is the country's full
/// in-panel moving-average series indexed by t (only read for CasesIhsMa3).
/// Missing mobility propagates as nullopt, never as a fabricated number.
std::optional<double> outcome_value(const PanelRow& row, OutcomeKind kind,
                                    std::span<const double> smoothed_cases);

} // namespace evpanel
