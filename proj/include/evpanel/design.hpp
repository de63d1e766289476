#pragma once

#include "evpanel/panel.hpp"
#include "evpanel/transforms.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace evpanel {

/// Specification variants. Dummy forms use event-time indicators; intensity
/// forms weight them by the policy's intensity level. Multi forms add the
/// concurrent-policy family.
enum class SpecVariant {
    SingleEventDummy,     // eq1
    MultiEventDummy,      // eq2
    SingleEventIntensity, // eq3 without the concurrent term
    MultiEventIntensity,  // eq3
};

std::string_view variant_name(SpecVariant v);
std::optional<SpecVariant> parse_variant(std::string_view name);

struct ControlFlags {
    bool time_dummies = true;
    bool day_of_week = true;
    bool region = true;
    bool prevalence_lag = true;
    bool covariates = true;
};

enum class ClusterBy { Country };

/// Full description of one regression.
struct EstimationSpec {
    PolicyKind policy = PolicyKind::EventsCancellation;
    OutcomeKind outcome = OutcomeKind::cases_ihs_ma3();
    int window_lo = -20;
    int window_hi = 35;
    int reference_event_time = -20;
    SpecVariant variant = SpecVariant::MultiEventIntensity;
    ControlFlags controls;
    ClusterBy cluster_by = ClusterBy::Country;

    bool multi_event() const {
        return variant == SpecVariant::MultiEventDummy || variant == SpecVariant::MultiEventIntensity;
    }
    bool intensity_weighted() const {
        return variant == SpecVariant::SingleEventIntensity ||
               variant == SpecVariant::MultiEventIntensity;
    }

    /// window_lo < window_hi and reference inside the window; throws otherwise.
    void validate() const;

    /// Stable tag used in output file names: policy_outcome_variant.
    std::string tag() const;
};

enum class ColumnFamily { Event, Concurrent, Time, DayOfWeek, Region, Prevalence, Covariate, Intercept };

/// Family plus family-specific level of one design column: the event time j,
/// the day index t, the weekday, the region index, or the covariate slot.
struct ColumnInfo {
    ColumnFamily family;
    int level = 0;
};

/// Response, regressor matrix, and labels for one spec. Rows are the panel
/// rows with a defined outcome and (when the control is on) a defined
/// prevalence lag; columns follow the term order of the estimating equation.
struct DesignProblem {
    Eigen::VectorXd y;
    Eigen::MatrixXd x;
    std::vector<std::string> column_labels;
    std::vector<ColumnInfo> column_info;
    std::vector<int> clusters;                  // per row (country index)
    std::vector<std::pair<int, Date>> row_keys; // (country index, date)

    // event/concurrent family bookkeeping: (event time j, column index)
    std::vector<std::pair<int, int>> event_columns;
    std::vector<std::pair<int, int>> concurrent_columns;

    // reference levels chosen for the categorical families (meaningful only
    // when the family is present)
    int time_reference = 0;
    int dow_reference = 0;
    Region region_reference = Region::Africa;
};

/// Intensity weight of the policy of interest at one row, per the
/// intensity-weighted event family: the contemporaneous level for event
/// times >= 0, the implementation-day level for anticipation days, and 0
/// outside the event window. Requires an implementation in that country.
double s_pi(const Panel& panel, int country, PolicyKind policy, Date date,
            const EstimationSpec& spec);

/// Builds the response and regressor matrix column by column. Throws when
/// the filtered sample is empty or no row falls inside the event window.
DesignProblem build_design(const Panel& panel, const EstimationSpec& spec);

} // namespace evpanel
