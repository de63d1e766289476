#include "evpanel/runner.hpp"

#include "evpanel/error.hpp"
#include "evpanel/estimator.hpp"
#include "evpanel/format.hpp"
#include "evpanel/simgen.hpp"

#include <json.hpp>

#include <atomic>
#include <fstream>
#include <ostream>
#include <set>
#include <thread>

namespace evpanel {

using nlohmann::json;

namespace {

json spec_to_json(const EstimationSpec& spec) {
    return json{{"policy", policy_name(spec.policy)},
                {"outcome", spec.outcome.name()},
                {"variant", variant_name(spec.variant)},
                {"window_lo", spec.window_lo},
                {"window_hi", spec.window_hi},
                {"reference", spec.reference_event_time},
                {"cluster_by", "country"},
                {"controls",
                 json{{"time_dummies", spec.controls.time_dummies},
                      {"day_of_week", spec.controls.day_of_week},
                      {"region", spec.controls.region},
                      {"prevalence_lag", spec.controls.prevalence_lag},
                      {"covariates", spec.controls.covariates}}}};
}

EstimationSpec spec_from_json(const json& j) {
    EstimationSpec spec;
    auto policy = parse_policy(j.at("policy").get<std::string>());
    if (!policy)
        fail("manifest: unknown policy '" + j.at("policy").get<std::string>() + "'");
    spec.policy = *policy;
    auto outcome = OutcomeKind::parse(j.at("outcome").get<std::string>());
    if (!outcome)
        fail("manifest: unknown outcome '" + j.at("outcome").get<std::string>() + "'");
    spec.outcome = *outcome;
    auto variant = parse_variant(j.value("variant", "eq3"));
    if (!variant)
        fail("manifest: unknown variant '" + j.value("variant", "") + "'");
    spec.variant = *variant;
    spec.window_lo = j.value("window_lo", -20);
    spec.window_hi = j.value("window_hi", 35);
    spec.reference_event_time = j.value("reference", spec.window_lo);
    if (j.contains("cluster_by") && j.at("cluster_by") != "country")
        fail("manifest: unsupported cluster_by '" + j.at("cluster_by").get<std::string>() + "'");
    if (j.contains("controls")) {
        const json& c = j.at("controls");
        spec.controls.time_dummies = c.value("time_dummies", true);
        spec.controls.day_of_week = c.value("day_of_week", true);
        spec.controls.region = c.value("region", true);
        spec.controls.prevalence_lag = c.value("prevalence_lag", true);
        spec.controls.covariates = c.value("covariates", true);
    }
    spec.validate();
    return spec;
}

std::ofstream open_out(const std::filesystem::path& p) {
    std::ofstream out(p);
    if (!out)
        fail(p.string() + ": cannot open for writing");
    return out;
}

void write_text(const std::filesystem::path& p, const std::string& text) {
    open_out(p) << text;
}

/// Coefficient series, sorted by j ascending, reference row included with
/// alpha 0 and se 0. Dropped columns print as nan; single-event variants
/// leave the beta fields empty.
void write_coefficients(const std::filesystem::path& path, const EventStudyResult& r) {
    std::ofstream out = open_out(path);
    out << "j,alpha,se,ci_lo,ci_hi,beta,beta_se\n";
    for (int j = r.window_lo; j <= r.window_hi; ++j) {
        const int k = j - r.window_lo;
        out << j << ',' << format_real(r.alpha[k]) << ',' << format_real(r.alpha_se[k]) << ','
            << format_real(r.ci_lo[k]) << ',' << format_real(r.ci_hi[k]) << ',';
        if (!r.beta.empty())
            out << format_real(r.beta[k]) << ',' << format_real(r.beta_se[k]);
        else
            out << ',';
        out << '\n';
    }
}

void write_diagnostics(const std::filesystem::path& path, const EstimationSpec& spec,
                       const EventStudyResult& r) {
    std::ofstream out = open_out(path);
    out << "key,value\n";
    out << "policy," << policy_name(spec.policy) << '\n';
    out << "outcome," << spec.outcome.name() << '\n';
    out << "variant," << variant_name(spec.variant) << '\n';
    out << "n," << r.n << '\n';
    out << "clusters," << r.n_clusters << '\n';
    out << "p_retained," << r.p_retained << '\n';
    out << "rss," << format_real(r.rss) << '\n';
    out << "dropped_columns,";
    for (std::size_t i = 0; i < r.dropped_columns.size(); ++i)
        out << (i ? ";" : "") << r.dropped_columns[i];
    out << '\n';
}

LinearDgpConfig linear_config_from_json(const json& j);
SirDgpConfig sir_config_from_json(const json& j);

json truth_to_json(const LinearTruth& truth) {
    json alpha = json::array(), beta = json::array();
    for (double v : truth.alpha_by_j)
        alpha.push_back(v);
    for (double v : truth.beta_by_j)
        beta.push_back(v);
    json coeffs = json::object();
    for (const auto& [label, value] : truth.coefficients)
        coeffs[label] = value;
    return json{{"type", "linear"},
                {"policy", policy_name(truth.spec.policy)},
                {"outcome", truth.spec.outcome.name()},
                {"variant", variant_name(truth.spec.variant)},
                {"window_lo", truth.spec.window_lo},
                {"window_hi", truth.spec.window_hi},
                {"reference", truth.spec.reference_event_time},
                {"noise_sd", truth.noise_sd},
                {"alpha_by_j", alpha},
                {"beta_by_j", beta},
                {"coefficients", coeffs}};
}

json truth_to_json(const SirTruth& truth) {
    json effects = json::object();
    for (PolicyKind p : kAllPolicies)
        effects[std::string(policy_name(p))] = truth.effects[static_cast<std::size_t>(p)];
    json countries = json::array();
    for (const auto& c : truth.countries) {
        json impl = json::object();
        for (PolicyKind p : kAllPolicies)
            if (c.impl_day[static_cast<std::size_t>(p)] >= 0)
                impl[std::string(policy_name(p))] = c.impl_day[static_cast<std::size_t>(p)];
        countries.push_back(json{{"country", c.country},
                                 {"population", c.population},
                                 {"i0", c.i0},
                                 {"beta0", c.beta0},
                                 {"gamma_rec", c.gamma_rec},
                                 {"first_case_t", c.first_case_t},
                                 {"impl_day", impl},
                                 {"clamped", c.clamped}});
    }
    return json{{"type", "sir"}, {"effects", effects}, {"countries", countries}};
}

} // namespace

std::string RunManifest::to_json() const {
    json j;
    j["tool_version"] = tool_version;
    j["command"] = command;
    if (inputs) {
        j["inputs"] = json{{"policies", inputs->policies.string()},
                           {"cases", inputs->cases.string()},
                           {"mobility", inputs->mobility.string()},
                           {"covariates", inputs->covariates.string()}};
    }
    if (!sim_config_json.empty())
        j["sim_config"] = json::parse(sim_config_json);
    if (!specs.empty() || !invalid_specs.empty()) {
        json arr = json::array();
        for (const auto& spec : specs)
            arr.push_back(spec_to_json(spec));
        for (const auto& bad : invalid_specs)
            arr.push_back(json::parse(bad.raw_json));
        j["specs"] = arr;
    }
    j["jobs"] = jobs;
    if (command == "simulate")
        j["seed"] = seed;
    return j.dump(2) + "\n";
}

RunManifest RunManifest::parse_json(const std::string& text) {
    json j = json::parse(text, nullptr, true, true);
    RunManifest m;
    m.tool_version = j.value("tool_version", std::string(kToolVersion));
    m.command = j.value("command", "estimate");
    if (j.contains("inputs")) {
        const json& in = j.at("inputs");
        m.inputs = CanonicalPaths{in.at("policies").get<std::string>(),
                                  in.at("cases").get<std::string>(),
                                  in.at("mobility").get<std::string>(),
                                  in.at("covariates").get<std::string>()};
    }
    if (j.contains("sim_config"))
        m.sim_config_json = j.at("sim_config").dump();
    if (j.contains("specs"))
        for (const json& s : j.at("specs")) {
            try {
                m.specs.push_back(spec_from_json(s));
            } catch (const Error& e) {
                const std::string tag = s.value("policy", "?") + "_" + s.value("outcome", "?") +
                                        "_" + s.value("variant", "eq3");
                m.invalid_specs.push_back({s.dump(), tag, e.what()});
            }
        }
    m.jobs = j.value("jobs", 1);
    m.seed = j.value("seed", std::uint64_t{0});
    return m;
}

RunManifest RunManifest::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        fail(path.string() + ": cannot open manifest");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_json(text);
}

std::vector<EstimationSpec> full_batch_specs() {
    std::vector<EstimationSpec> specs;
    std::vector<OutcomeKind> outcomes{OutcomeKind::cases_ihs_ma3()};
    for (MobilityCategory cat : kAllMobilityCategories)
        outcomes.push_back(OutcomeKind::mobility(cat));
    for (PolicyKind policy : kAllPolicies)
        for (const OutcomeKind& outcome : outcomes) {
            EstimationSpec spec;
            spec.policy = policy;
            spec.outcome = outcome;
            specs.push_back(spec);
        }
    return specs;
}

int cmd_estimate(const RunManifest& manifest, std::ostream& log) {
    if (!manifest.inputs)
        fail("estimate: manifest has no input files");
    if (manifest.specs.empty() && manifest.invalid_specs.empty())
        fail("estimate: manifest has no specs");
    {
        std::set<std::string> tags;
        for (const auto& spec : manifest.specs)
            if (!tags.insert(spec.tag()).second)
                fail("estimate: duplicate spec " + spec.tag());
    }
    std::filesystem::create_directories(manifest.out_dir);

    log << "loading canonical files\n";
    const Panel panel = build_panel(load_canonical(*manifest.inputs));
    log << "panel: " << panel.countries().size() << " countries, " << panel.rows().size()
        << " rows\n";

    const int jobs = std::max(1, manifest.jobs);
    const std::size_t n_specs = manifest.specs.size();
    std::vector<std::string> errors(n_specs);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next.fetch_add(1); i < n_specs; i = next.fetch_add(1)) {
            const EstimationSpec& spec = manifest.specs[i];
            try {
                const EventStudyResult result = estimate(panel, spec);
                write_coefficients(manifest.out_dir / ("coeffs_" + spec.tag() + ".csv"), result);
                write_diagnostics(manifest.out_dir / ("diag_" + spec.tag() + ".csv"), spec, result);
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
        }
    };
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < jobs; ++w)
            pool.emplace_back(worker);
        for (auto& t : pool)
            t.join();
    }

    bool any_failed = !manifest.invalid_specs.empty();
    for (std::size_t i = 0; i < n_specs; ++i) {
        if (errors[i].empty()) {
            log << "ok  " << manifest.specs[i].tag() << "\n";
        } else {
            any_failed = true;
            log << "FAIL " << manifest.specs[i].tag() << ": " << errors[i] << "\n";
        }
    }
    for (const auto& bad : manifest.invalid_specs)
        log << "FAIL " << bad.tag << ": " << bad.error << "\n";
    if (any_failed) {
        std::ofstream out = open_out(manifest.out_dir / "errors.csv");
        out << "spec,error\n";
        for (std::size_t i = 0; i < n_specs; ++i)
            if (!errors[i].empty())
                out << manifest.specs[i].tag() << ',' << errors[i] << '\n';
        for (const auto& bad : manifest.invalid_specs)
            out << bad.tag << ',' << bad.error << '\n';
    }
    write_text(manifest.out_dir / "manifest.json", manifest.to_json());
    return any_failed ? kExitPartialFailure : kExitOk;
}

int cmd_summary(const RunManifest& manifest, std::ostream& log) {
    if (!manifest.inputs)
        fail("summary: manifest has no input files");
    std::filesystem::create_directories(manifest.out_dir);

    const PanelSources sources = load_canonical(*manifest.inputs);
    const Panel panel = build_panel(sources);

    // per-policy distribution of implementation day minus first-case day
    {
        std::ofstream out = open_out(manifest.out_dir / "summary_policy_offsets.csv");
        out << "policy,country_iso3,offset_days\n";
        for (PolicyKind p : kAllPolicies)
            for (std::size_t c = 0; c < panel.countries().size(); ++c)
                if (auto impl = panel.implementation_date(static_cast<int>(c), p))
                    out << policy_name(p) << ',' << panel.countries()[c] << ','
                        << (*impl - panel.first_case_date(static_cast<int>(c))) << '\n';
    }

    // mobility values split before/after the first case
    {
        std::ofstream out = open_out(manifest.out_dir / "summary_mobility_split.csv");
        out << "category,country_iso3,period,date,deviation_pp\n";
        std::vector<const MobilitySeries*> ordered;
        for (const auto& m : sources.mobility)
            ordered.push_back(&m);
        std::sort(ordered.begin(), ordered.end(),
                  [](const auto* a, const auto* b) { return a->country() < b->country(); });
        for (MobilityCategory cat : kAllMobilityCategories)
            for (const MobilitySeries* m : ordered) {
                auto country = panel.country_index(m->country());
                if (!country)
                    continue; // no observed case, excluded from the densities
                const Date first_case = panel.first_case_date(*country);
                for (const auto& [date, value] : m->values(cat))
                    out << mobility_category_name(cat) << ',' << m->country() << ','
                        << (date < first_case ? "before" : "after") << ',' << date.to_string()
                        << ',' << format_real(value) << '\n';
            }
    }

    write_text(manifest.out_dir / "manifest.json", manifest.to_json());
    log << "summary written to " << manifest.out_dir.string() << "\n";
    return kExitOk;
}

namespace {

LinearDgpConfig linear_config_from_json(const json& j) {
    LinearDgpConfig cfg;
    cfg.n_countries = j.value("n_countries", cfg.n_countries);
    cfg.n_days = j.value("n_days", cfg.n_days);
    if (j.contains("policy")) {
        auto p = parse_policy(j.at("policy").get<std::string>());
        if (!p)
            fail("sim config: unknown policy '" + j.at("policy").get<std::string>() + "'");
        cfg.policy = *p;
    }
    if (j.contains("variant")) {
        auto v = parse_variant(j.at("variant").get<std::string>());
        if (!v)
            fail("sim config: unknown variant '" + j.at("variant").get<std::string>() + "'");
        cfg.variant = *v;
    }
    if (j.contains("window")) {
        cfg.window_lo = j.at("window").at(0).get<int>();
        cfg.window_hi = j.at("window").at(1).get<int>();
        cfg.reference = cfg.window_lo;
    }
    cfg.reference = j.value("reference", cfg.reference);
    if (j.contains("outcome_category")) {
        auto c = parse_mobility_category(j.at("outcome_category").get<std::string>());
        if (!c)
            fail("sim config: unknown mobility category");
        cfg.outcome_category = *c;
    }
    if (j.contains("true_alpha"))
        cfg.true_alpha = j.at("true_alpha").get<std::vector<double>>();
    if (j.contains("true_beta"))
        cfg.true_beta = j.at("true_beta").get<std::vector<double>>();
    if (j.contains("gamma_time"))
        cfg.gamma_time = j.at("gamma_time").get<std::vector<double>>();
    if (j.contains("delta_dow"))
        cfg.delta_dow = j.at("delta_dow").get<std::array<double, 7>>();
    if (j.contains("rho_region"))
        cfg.rho_region = j.at("rho_region").get<std::array<double, kRegionCount>>();
    cfg.phi = j.value("phi", cfg.phi);
    if (j.contains("theta"))
        cfg.theta = j.at("theta").get<std::array<double, 4>>();
    cfg.intercept = j.value("intercept", cfg.intercept);
    cfg.noise_sd = j.value("noise_sd", cfg.noise_sd);
    cfg.seed = j.value("seed", cfg.seed);
    if (j.contains("timing")) {
        for (const auto& [name, rule_json] : j.at("timing").items()) {
            auto p = parse_policy(name);
            if (!p)
                fail("sim config: unknown policy '" + name + "' in timing");
            PolicyTimingRule& rule = cfg.timing[static_cast<std::size_t>(*p)];
            rule.active = rule_json.value("active", true);
            rule.impl_lo = rule_json.value("impl_lo", rule.impl_lo);
            rule.impl_hi = rule_json.value("impl_hi", rule.impl_hi);
            rule.level_lo = rule_json.value("level_lo", rule.level_lo);
            rule.level_hi = rule_json.value("level_hi", rule.level_hi);
            rule.escalation_prob = rule_json.value("escalation_prob", rule.escalation_prob);
            rule.escalation_delay_lo = rule_json.value("escalation_delay_lo", rule.escalation_delay_lo);
            rule.escalation_delay_hi = rule_json.value("escalation_delay_hi", rule.escalation_delay_hi);
            if (rule_json.contains("follows")) {
                auto leader = parse_policy(rule_json.at("follows").get<std::string>());
                if (!leader)
                    fail("sim config: unknown policy in 'follows'");
                rule.follows = *leader;
                rule.follow_lo = rule_json.value("follow_lo", rule.follow_lo);
                rule.follow_hi = rule_json.value("follow_hi", rule.follow_hi);
            }
        }
    }
    return cfg;
}

SirDgpConfig sir_config_from_json(const json& j) {
    SirDgpConfig cfg;
    cfg.n_countries = j.value("n_countries", cfg.n_countries);
    cfg.n_days = j.value("n_days", cfg.n_days);
    if (j.contains("pop")) {
        cfg.pop_lo = j.at("pop").at(0).get<double>();
        cfg.pop_hi = j.at("pop").at(1).get<double>();
    }
    if (j.contains("i0")) {
        cfg.i0_lo = j.at("i0").at(0).get<double>();
        cfg.i0_hi = j.at("i0").at(1).get<double>();
    }
    if (j.contains("beta0")) {
        cfg.beta0_lo = j.at("beta0").at(0).get<double>();
        cfg.beta0_hi = j.at("beta0").at(1).get<double>();
    }
    if (j.contains("gamma")) {
        cfg.gamma_lo = j.at("gamma").at(0).get<double>();
        cfg.gamma_hi = j.at("gamma").at(1).get<double>();
    }
    cfg.detection = j.value("detection", cfg.detection);
    if (j.contains("dow_multipliers"))
        cfg.dow_multipliers = j.at("dow_multipliers").get<std::array<double, 7>>();
    cfg.seed = j.value("seed", cfg.seed);
    if (j.contains("policies")) {
        for (const auto& [name, rule_json] : j.at("policies").items()) {
            auto p = parse_policy(name);
            if (!p)
                fail("sim config: unknown policy '" + name + "'");
            SirPolicyRule& rule = cfg.policies[static_cast<std::size_t>(*p)];
            rule.active = true;
            rule.effect = rule_json.value("effect", 0.0);
            if (rule_json.contains("start")) {
                rule.start_lo = rule_json.at("start").at(0).get<int>();
                rule.start_hi = rule_json.at("start").at(1).get<int>();
            }
            rule.level = rule_json.value("level", rule.level);
            rule.from_day_zero = rule_json.value("from_day_zero", false);
        }
    }
    return cfg;
}

} // namespace

int cmd_simulate(const std::string& config_json, const std::filesystem::path& out_dir,
                 std::ostream& log) {
    json j;
    try {
        j = json::parse(config_json, nullptr, true, true);
    } catch (const json::exception& e) {
        fail(std::string("sim config: ") + e.what());
    }
    const std::string type = j.value("type", "");
    if (type != "linear" && type != "sir")
        fail("sim config: 'type' must be \"linear\" or \"sir\"");

    std::filesystem::create_directories(out_dir);
    RunManifest manifest;
    manifest.command = "simulate";
    manifest.sim_config_json = j.dump();
    manifest.out_dir = out_dir;
    manifest.seed = j.value("seed", std::uint64_t{1});

    if (type == "linear") {
        const LinearDgpConfig cfg = linear_config_from_json(j);
        const LinearSimResult sim = simulate_linear_panel(cfg);
        write_canonical(sim.sources, CanonicalPaths::in_dir(out_dir));
        write_text(out_dir / "truth.json", truth_to_json(sim.truth).dump(2) + "\n");
        log << "linear panel: " << sim.panel.countries().size() << " countries, "
            << sim.panel.rows().size() << " rows\n";
    } else {
        const SirDgpConfig cfg = sir_config_from_json(j);
        const SirRawResult sim = simulate_sir_raw(cfg);
        write_canonical(sim.sources, CanonicalPaths::in_dir(out_dir));
        write_text(out_dir / "truth.json", truth_to_json(sim.truth).dump(2) + "\n");
        log << "sir series: " << sim.sources.epi.size() << " of " << cfg.n_countries
            << " countries reported cases\n";
    }
    write_text(out_dir / "manifest.json", manifest.to_json());
    return kExitOk;
}

int cmd_rerun(const std::filesystem::path& manifest_path, const std::filesystem::path& out_dir,
              std::ostream& log) {
    RunManifest manifest = RunManifest::load(manifest_path);
    manifest.out_dir = out_dir;
    if (manifest.command == "estimate")
        return cmd_estimate(manifest, log);
    if (manifest.command == "summary")
        return cmd_summary(manifest, log);
    if (manifest.command == "simulate")
        return cmd_simulate(manifest.sim_config_json, out_dir, log);
    fail("manifest: unknown command '" + manifest.command + "'");
}

} // namespace evpanel
