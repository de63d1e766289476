#include "evpanel/simgen.hpp"

#include "evpanel/error.hpp"

#include <algorithm>
#include <cmath>

namespace evpanel {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Synthetic alpha-3 code for country index i: AAA, AAB, ...
std::string country_code(int i) {
    std::string code = "AAA";
    code[2] = static_cast<char>('A' + i % 26);
    code[1] = static_cast<char>('A' + (i / 26) % 26);
    code[0] = static_cast<char>('A' + (i / 676) % 26);
    return code;
}

const Date kLinearBaseDate = Date::from_ymd(2020, 2, 1);
const Date kSirBaseDate = Date::from_ymd(2020, 1, 15);

int uniform_int(std::mt19937_64& eng, int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(eng);
}

double uniform_real(std::mt19937_64& eng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(eng);
}

CountryCovariates draw_covariates(std::mt19937_64& eng, const std::string& code) {
    CountryCovariates cov;
    cov.country = code;
    cov.region = static_cast<Region>(uniform_int(eng, 0, kRegionCount - 1));
    std::normal_distribution<double> unit;
    cov.gdp_per_capita = std::exp(9.2 + 0.7 * unit(eng));
    cov.population = std::exp(16.0 + 1.3 * unit(eng));
    cov.population_density = std::exp(4.3 + 0.9 * unit(eng));
    cov.urbanization_rate = uniform_real(eng, 20.0, 95.0);
    return cov;
}

} // namespace

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream) {
    return std::mt19937_64(splitmix64(seed ^ splitmix64(stream)));
}

EstimationSpec LinearDgpConfig::matching_spec() const {
    EstimationSpec spec;
    spec.policy = policy;
    spec.outcome = OutcomeKind::mobility(outcome_category);
    spec.window_lo = window_lo;
    spec.window_hi = window_hi;
    spec.reference_event_time = reference;
    spec.variant = variant;
    return spec;
}

void LinearDgpConfig::validate() const {
    matching_spec().validate();
    if (n_countries < 2)
        fail("linear DGP: need at least 2 countries");
    if (n_days < 2)
        fail("linear DGP: need at least 2 days");
    const std::size_t width = static_cast<std::size_t>(window_hi - window_lo + 1);
    if (!true_alpha.empty() && true_alpha.size() != width)
        fail("linear DGP: true_alpha length " + std::to_string(true_alpha.size()) +
             " inconsistent with the window width " + std::to_string(width));
    if (!true_alpha.empty() && true_alpha[reference - window_lo] != 0.0)
        fail("linear DGP: true_alpha at the reference event time must be 0");
    if (!true_beta.empty() && true_beta.size() != width)
        fail("linear DGP: true_beta length inconsistent with the window width");
    if (!gamma_time.empty() && gamma_time.size() != static_cast<std::size_t>(n_days))
        fail("linear DGP: gamma_time length must equal n_days");
    if (noise_sd < 0)
        fail("linear DGP: noise_sd must be >= 0");
    for (PolicyKind p : kAllPolicies) {
        const PolicyTimingRule& rule = timing[static_cast<std::size_t>(p)];
        if (!rule.active)
            continue;
        if (rule.level_lo < 1 || rule.level_hi > kMaxIntensity || rule.level_lo > rule.level_hi)
            fail("linear DGP: intensity levels must lie in [1, 6]");
        if (rule.impl_lo > rule.impl_hi || rule.follow_lo > rule.follow_hi)
            fail("linear DGP: empty timing range for " + std::string(policy_name(p)));
        if (rule.follows) {
            if (*rule.follows == p)
                fail("linear DGP: policy cannot follow itself");
            const auto& leader = timing[static_cast<std::size_t>(*rule.follows)];
            if (!leader.active || leader.follows)
                fail("linear DGP: a policy may only follow an active, non-following policy");
        }
    }
}

LinearSimResult simulate_linear_panel(const LinearDgpConfig& config) {
    config.validate();
    const int width = config.window_hi - config.window_lo + 1;

    std::vector<double> alpha = config.true_alpha;
    if (alpha.empty()) {
        alpha.assign(width, 0.0);
        for (int j = std::max(1, config.window_lo); j <= config.window_hi; ++j)
            alpha[j - config.window_lo] = -0.02 * j;
        alpha[config.reference - config.window_lo] = 0.0;
    }
    std::vector<double> beta = config.true_beta;
    if (beta.empty())
        beta.assign(width, 0.0);
    std::vector<double> gamma_time = config.gamma_time;
    if (gamma_time.empty()) {
        gamma_time.resize(config.n_days);
        for (int t = 0; t < config.n_days; ++t)
            gamma_time[t] = 1.5 * std::sin(2.0 * M_PI * t / 28.0) + 0.01 * t;
    }

    PanelSources sources;
    for (int c = 0; c < config.n_countries; ++c) {
        auto eng = make_engine(config.seed, static_cast<std::uint64_t>(c));
        const std::string code = country_code(c);
        sources.covariates.push_back(draw_covariates(eng, code));

        const Date first_case = kLinearBaseDate + uniform_int(eng, 0, 48);

        // epidemic ramp: deterministic exponential-ish growth, independent of
        // the outcome, so the prevalence control is well defined
        const double growth = uniform_real(eng, 0.05, 0.12);
        std::vector<std::int64_t> cum(config.n_days), fresh(config.n_days);
        for (int t = 0; t < config.n_days; ++t) {
            cum[t] = static_cast<std::int64_t>(std::floor(3.0 * std::pow(1.0 + growth, t)));
            fresh[t] = cum[t] - (t == 0 ? 0 : cum[t - 1]);
        }
        sources.epi.push_back(
            EpiSeries::from_new_and_cumulative(code, first_case, std::move(fresh), std::move(cum)));

        // policy schedules: non-following policies first, then followers
        std::array<std::optional<int>, kPolicyCount> impl_t;
        for (int pass = 0; pass < 2; ++pass) {
            for (PolicyKind p : kAllPolicies) {
                const auto& rule = config.timing[static_cast<std::size_t>(p)];
                if (!rule.active || (rule.follows.has_value() != (pass == 1)))
                    continue;
                int day;
                if (rule.follows) {
                    const auto& leader = impl_t[static_cast<std::size_t>(*rule.follows)];
                    if (!leader)
                        continue;
                    day = *leader + uniform_int(eng, rule.follow_lo, rule.follow_hi);
                } else {
                    day = uniform_int(eng, rule.impl_lo, rule.impl_hi);
                }
                impl_t[static_cast<std::size_t>(p)] = day;
                const int level0 = uniform_int(eng, rule.level_lo, rule.level_hi);
                std::map<Date, int> entries{{first_case + day, level0}};
                if (std::bernoulli_distribution(rule.escalation_prob)(eng)) {
                    const int delay =
                        uniform_int(eng, rule.escalation_delay_lo, rule.escalation_delay_hi);
                    const int level1 = uniform_int(eng, level0, kMaxIntensity);
                    if (level1 != level0)
                        entries.emplace(first_case + day + delay, level1);
                }
                sources.schedules.emplace_back(code, p, std::move(entries));
            }
        }

        // placeholder outcome; replaced once the design is known
        MobilitySeries mob(code);
        for (int t = 0; t < config.n_days; ++t)
            mob.set(config.outcome_category, first_case + t, 0.0);
        sources.mobility.push_back(std::move(mob));
    }

    const Panel provisional = build_panel(sources);
    const EstimationSpec spec = config.matching_spec();
    const DesignProblem dp = build_design(provisional, spec);

    // truth vector over the design's own columns; categorical families are
    // shifted so the reference level carries 0 and the intercept absorbs it
    const double shift = gamma_time[dp.time_reference] + config.delta_dow[dp.dow_reference] +
                         config.rho_region[static_cast<int>(dp.region_reference)];
    Eigen::VectorXd theta(dp.x.cols());
    for (Eigen::Index k = 0; k < dp.x.cols(); ++k) {
        const ColumnInfo& info = dp.column_info[k];
        switch (info.family) {
        case ColumnFamily::Event:
            theta(k) = alpha[info.level - config.window_lo];
            break;
        case ColumnFamily::Concurrent:
            theta(k) = beta[info.level - config.window_lo];
            break;
        case ColumnFamily::Time:
            theta(k) = gamma_time[info.level] - gamma_time[dp.time_reference];
            break;
        case ColumnFamily::DayOfWeek:
            theta(k) = config.delta_dow[info.level] - config.delta_dow[dp.dow_reference];
            break;
        case ColumnFamily::Region:
            theta(k) =
                config.rho_region[info.level] - config.rho_region[static_cast<int>(dp.region_reference)];
            break;
        case ColumnFamily::Prevalence:
            theta(k) = config.phi;
            break;
        case ColumnFamily::Covariate:
            theta(k) = config.theta[info.level];
            break;
        case ColumnFamily::Intercept:
            theta(k) = config.intercept + shift;
            break;
        }
    }

    Eigen::VectorXd y = dp.x * theta;
    if (config.noise_sd > 0) {
        auto noise_eng = make_engine(config.seed, 0x6e6f697365ULL);
        std::normal_distribution<double> unit;
        for (Eigen::Index i = 0; i < y.size(); ++i)
            y(i) += config.noise_sd * unit(noise_eng);
    }

    // write the outcome back into the mobility category and rebuild
    std::map<std::string_view, std::size_t> mob_index;
    for (std::size_t m = 0; m < sources.mobility.size(); ++m)
        mob_index[sources.mobility[m].country()] = m;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        const auto& [country, date] = dp.row_keys[i];
        sources.mobility[mob_index.at(provisional.countries()[country])].set(
            config.outcome_category, date, y(i));
    }

    LinearSimResult result{build_panel(sources), std::move(sources), LinearTruth{}};
    result.truth.spec = spec;
    result.truth.noise_sd = config.noise_sd;
    result.truth.alpha_by_j = alpha;
    if (spec.multi_event())
        result.truth.beta_by_j = beta;
    for (Eigen::Index k = 0; k < theta.size(); ++k)
        result.truth.coefficients[dp.column_labels[k]] = theta(k);
    return result;
}

void SirDgpConfig::validate() const {
    if (n_countries < 1 || n_days < 2)
        fail("SIR DGP: need at least 1 country and 2 days");
    if (!(detection > 0 && detection <= 1))
        fail("SIR DGP: detection rate must lie in (0, 1]");
    if (!(pop_lo > 0 && pop_lo <= pop_hi) || !(i0_lo > 0 && i0_lo <= i0_hi))
        fail("SIR DGP: population and seed-infection ranges must be positive");
    if (!(beta0_lo > 0 && beta0_lo <= beta0_hi))
        fail("SIR DGP: transmission range must be positive");
    if (!(gamma_lo > 0 && gamma_hi < 1 && gamma_lo <= gamma_hi))
        fail("SIR DGP: recovery rate must lie in (0, 1)");
    double dow_sum = 0;
    for (double m : dow_multipliers) {
        if (m < 0)
            fail("SIR DGP: day-of-week multipliers must be non-negative");
        dow_sum += m;
    }
    if (std::abs(dow_sum / 7.0 - 1.0) > 1e-9)
        fail("SIR DGP: day-of-week multipliers must average to 1");
    for (PolicyKind p : kAllPolicies) {
        const auto& rule = policies[static_cast<std::size_t>(p)];
        if (!rule.active)
            continue;
        if (!(rule.effect >= 0 && rule.effect <= 1))
            fail("SIR DGP: effect size for " + std::string(policy_name(p)) + " outside [0, 1]");
        if (rule.level < 1 || rule.level > kMaxIntensity)
            fail("SIR DGP: level for " + std::string(policy_name(p)) + " outside [1, 6]");
        if (!rule.from_day_zero && (rule.start_lo < 1 || rule.start_lo > rule.start_hi))
            fail("SIR DGP: start offsets for " + std::string(policy_name(p)) +
                 " must satisfy 1 <= lo <= hi");
    }
}

SirRawResult simulate_sir_raw(const SirDgpConfig& config) {
    config.validate();

    SirRawResult out;
    out.truth.effects = {};
    for (PolicyKind p : kAllPolicies)
        out.truth.effects[static_cast<std::size_t>(p)] =
            config.policies[static_cast<std::size_t>(p)].effect;

    for (int c = 0; c < config.n_countries; ++c) {
        auto eng = make_engine(config.seed, 0x5349520000ULL + static_cast<std::uint64_t>(c));
        const std::string code = country_code(c);

        CountryCovariates cov = draw_covariates(eng, code);
        const double population = uniform_real(eng, config.pop_lo, config.pop_hi);
        cov.population = population;
        out.sources.covariates.push_back(cov);

        SirCountryTruth truth;
        truth.country = code;
        truth.population = population;
        truth.i0 = uniform_real(eng, config.i0_lo, std::min(config.i0_hi, population / 2));
        truth.beta0 = uniform_real(eng, config.beta0_lo, config.beta0_hi);
        truth.gamma_rec = uniform_real(eng, config.gamma_lo, config.gamma_hi);
        truth.impl_day.fill(-1);
        const Date anchor = kSirBaseDate + uniform_int(eng, 0, 13);

        for (PolicyKind p : kAllPolicies)
            if (config.policies[static_cast<std::size_t>(p)].active &&
                config.policies[static_cast<std::size_t>(p)].from_day_zero)
                truth.impl_day[static_cast<std::size_t>(p)] = 0;

        double susceptible = population - truth.i0;
        double infected = truth.i0;
        double recovered = 0.0;
        std::map<Date, std::int64_t> reported;
        for (int t = 0; t < config.n_days; ++t) {
            double beta_t = truth.beta0;
            for (PolicyKind p : kAllPolicies) {
                const auto& rule = config.policies[static_cast<std::size_t>(p)];
                const int start = truth.impl_day[static_cast<std::size_t>(p)];
                if (rule.active && start >= 0 && t >= start)
                    beta_t *= 1.0 - rule.effect * rule.level / 6.0;
            }
            double new_inf = beta_t * susceptible * infected / population;
            if (new_inf > susceptible) {
                new_inf = susceptible;
                truth.clamped = true;
            }
            const double mean =
                config.detection * new_inf * config.dow_multipliers[(anchor + t).day_of_week()];
            std::int64_t cases = 0;
            if (mean > 0)
                cases = std::poisson_distribution<std::int64_t>(mean)(eng);
            if (cases > 0) {
                reported[anchor + t] = cases;
                if (truth.first_case_t < 0) {
                    truth.first_case_t = t;
                    // schedule the remaining active policies relative to detection
                    for (PolicyKind p : kAllPolicies) {
                        const auto& rule = config.policies[static_cast<std::size_t>(p)];
                        if (rule.active && !rule.from_day_zero)
                            truth.impl_day[static_cast<std::size_t>(p)] =
                                t + uniform_int(eng, rule.start_lo, rule.start_hi);
                    }
                }
            }
            susceptible -= new_inf;
            infected = (1.0 - truth.gamma_rec) * infected + new_inf;
            recovered = population - susceptible - infected;
            truth.susceptible.push_back(susceptible);
            truth.infected.push_back(infected);
            truth.recovered.push_back(recovered);
        }

        for (PolicyKind p : kAllPolicies) {
            const auto& rule = config.policies[static_cast<std::size_t>(p)];
            const int start = truth.impl_day[static_cast<std::size_t>(p)];
            if (rule.active && start >= 0 && start < config.n_days)
                out.sources.schedules.emplace_back(code, p,
                                                   std::map<Date, int>{{anchor + start, rule.level}});
        }

        if (!reported.empty()) {
            reported.try_emplace(anchor + (config.n_days - 1), 0); // keep the full range
            out.sources.epi.push_back(EpiSeries::from_daily_new_cases(code, reported));
        }
        out.truth.countries.push_back(std::move(truth));
    }
    return out;
}

SirSimResult simulate_sir_panel(const SirDgpConfig& config) {
    SirRawResult raw = simulate_sir_raw(config);
    if (raw.sources.epi.empty())
        fail("simulate_sir_panel: no country ever reported a case");
    Panel panel = build_panel(raw.sources);
    return SirSimResult{std::move(panel), std::move(raw.sources), std::move(raw.truth)};
}

} // namespace evpanel
