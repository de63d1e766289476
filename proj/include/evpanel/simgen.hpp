#pragma once

#include "evpanel/estimator.hpp"
#include "evpanel/panel.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <random>

namespace evpanel {

/// Deterministic engine for one logical stream of a seeded generator.
/// Streams are decorrelated with SplitMix64 mixing so countries can be
/// generated independently (and in parallel) with reproducible results.
std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream);

/// Timing rule for one policy in the linear DGP. Implementation day is drawn
/// uniformly on [impl_lo, impl_hi] (in days since the first case; negative
/// means before it), or relative to another policy when `follows` is set.
struct PolicyTimingRule {
    bool active = true;
    int impl_lo = 2;
    int impl_hi = 100;
    int level_lo = 1;
    int level_hi = 6;
    double escalation_prob = 0.5;
    int escalation_delay_lo = 5;
    int escalation_delay_hi = 20;
    std::optional<PolicyKind> follows;
    int follow_lo = 0;
    int follow_hi = 6;
};

/// Linear data-generating process: the outcome is exactly the estimating
/// equation's linear form, written into one mobility category, plus optional
/// Gaussian noise. The intensity convention of the event family (including
/// the implementation-day weighting of anticipation days) is the design
/// module's own, so estimation at zero noise is exact.
struct LinearDgpConfig {
    int n_countries = 135;
    int n_days = 150;
    PolicyKind policy = PolicyKind::EventsCancellation;
    SpecVariant variant = SpecVariant::MultiEventIntensity;
    int window_lo = -20;
    int window_hi = 35;
    int reference = -20;
    MobilityCategory outcome_category = MobilityCategory::Residential;

    /// Event and concurrent coefficient profiles over the window; size must
    /// be window_hi - window_lo + 1 and the entry at the reference must be 0.
    /// Empty vectors are filled with a gentle post-period decline.
    std::vector<double> true_alpha;
    std::vector<double> true_beta;

    /// Control coefficients. gamma_time has one entry per day index (empty:
    /// a smooth default curve); weekday and region families are shifted so
    /// the sample reference level is 0, with the intercept absorbing shifts.
    std::vector<double> gamma_time;
    std::array<double, 7> delta_dow = {0.0, 0.1, 0.15, 0.1, 0.05, -0.3, -0.35};
    std::array<double, kRegionCount> rho_region = {0.8, -0.4, 0.2, 0.6, -0.2, 0.3, 0.0};
    double phi = -0.3;
    std::array<double, 4> theta = {0.2, -0.1, 0.15, 0.01};
    double intercept = 10.0;

    double noise_sd = 0.0;
    std::array<PolicyTimingRule, kPolicyCount> timing{};
    std::uint64_t seed = 1;

    EstimationSpec matching_spec() const;
    void validate() const;
};

/// Everything needed to score an estimate of the linear DGP.
struct LinearTruth {
    EstimationSpec spec;
    double noise_sd = 0.0;
    std::map<std::string, double> coefficients; // per design column label
    std::vector<double> alpha_by_j;             // identified values, ref = 0
    std::vector<double> beta_by_j;              // empty for single variants
};

struct LinearSimResult {
    Panel panel;
    PanelSources sources;
    LinearTruth truth;
};

LinearSimResult simulate_linear_panel(const LinearDgpConfig& config);

/// One policy in the SIR DGP: effect size on transmission and when/at what
/// level it switches on. Implementation day is first detected case plus a
/// uniform draw on [start_lo, start_hi] (start_lo >= 1), or simulation day 0
/// when from_day_zero is set.
struct SirPolicyRule {
    double effect = 0.0; // e in [0, 1]
    bool active = false;
    int start_lo = 10;
    int start_hi = 40;
    int level = 6;
    bool from_day_zero = false;
};

/// Discrete-day SIR with policy-modulated transmission
/// beta_t = beta0 * prod_pi (1 - e_pi * level/6) and Poisson case reporting
/// with day-of-week multipliers as the only stochastic layer.
struct SirDgpConfig {
    int n_countries = 50;
    int n_days = 120;
    double pop_lo = 2e5, pop_hi = 5e6;
    double i0_lo = 5.0, i0_hi = 50.0;
    double beta0_lo = 0.25, beta0_hi = 0.40;
    double gamma_lo = 0.08, gamma_hi = 0.12; // recovery rate, per day
    double detection = 0.3;
    std::array<double, 7> dow_multipliers = {1.05, 1.03, 1.0, 1.0, 1.02, 0.95, 0.95};
    std::array<SirPolicyRule, kPolicyCount> policies{};
    std::uint64_t seed = 1;

    void validate() const;
};

struct SirCountryTruth {
    std::string country;
    double population = 0.0;
    double i0 = 0.0;
    double beta0 = 0.0;
    double gamma_rec = 0.0;
    int first_case_t = -1; // simulation day of the first reported case
    std::array<int, kPolicyCount> impl_day{}; // simulation day, -1 when never
    bool clamped = false; // new infections ever clamped at S
    // daily true compartments, for conservation checks
    std::vector<double> susceptible, infected, recovered;
};

struct SirTruth {
    std::array<double, kPolicyCount> effects{};
    std::vector<SirCountryTruth> countries;
};

/// Raw simulation output; always available, even when no case is ever
/// reported anywhere (full suppression) and no panel can be built.
struct SirRawResult {
    PanelSources sources;
    SirTruth truth;
};

SirRawResult simulate_sir_raw(const SirDgpConfig& config);

struct SirSimResult {
    Panel panel;
    PanelSources sources;
    SirTruth truth;
};

/// Raw simulation plus panel assembly; throws when no country reports a case.
SirSimResult simulate_sir_panel(const SirDgpConfig& config);

} // namespace evpanel
