// evpanel: multiple-events panel estimator for dynamic policy effects.
// Subcommands: simulate (synthetic panels), estimate (batch event-study
// regressions), summary (descriptive exports), rerun (replay a manifest).

#include "evpanel/error.hpp"
#include "evpanel/runner.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        evpanel::fail(path.string() + ": cannot open");
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

bool parse_window(const std::string& text, int& lo, int& hi) {
    const auto colon = text.find(':');
    if (colon == std::string::npos)
        return false;
    try {
        lo = std::stoi(text.substr(0, colon));
        hi = std::stoi(text.substr(colon + 1));
    } catch (const std::exception&) {
        return false;
    }
    return true;
}

} // namespace

int main(int argc, char** argv) {
    using namespace evpanel;

    CLI::App app{"evpanel - multiple-events panel estimator for policy effects"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kToolVersion));

    // simulate
    auto* sim = app.add_subcommand("simulate", "generate a synthetic panel in canonical format");
    std::string sim_config, sim_out;
    sim->add_option("--config", sim_config, "simulation config (JSON)")->required();
    sim->add_option("--out", sim_out, "output directory")->required();

    // estimate
    auto* est = app.add_subcommand("estimate", "run event-study regressions");
    std::string est_manifest, est_out;
    std::string opt_policies, opt_cases, opt_mobility, opt_covariates;
    std::string opt_policy, opt_outcome = "cases_ihs_ma3", opt_variant = "eq3";
    std::string opt_window = "-20:35", opt_cluster = "country";
    int opt_ref = -20, opt_jobs = 1;
    bool opt_all = false;
    est->add_option("--manifest", est_manifest, "run manifest (JSON); overrides other flags");
    est->add_option("--policies", opt_policies, "canonical policies file");
    est->add_option("--cases", opt_cases, "canonical cases file");
    est->add_option("--mobility", opt_mobility, "canonical mobility file");
    est->add_option("--covariates", opt_covariates, "canonical covariates file");
    est->add_option("--policy", opt_policy, "policy of interest");
    est->add_option("--outcome", opt_outcome, "outcome name (default cases_ihs_ma3)");
    est->add_option("--variant", opt_variant, "eq1|eq2|eq3-single|eq3 (default eq3)");
    est->add_option("--window", opt_window, "event window LO:HI (default -20:35)");
    est->add_option("--ref", opt_ref, "reference event time (default -20)");
    est->add_option("--cluster", opt_cluster, "cluster dimension (country)");
    est->add_option("--jobs", opt_jobs, "parallel spec workers (default 1)");
    est->add_flag("--all", opt_all, "full 8-policy x 7-outcome batch");
    est->add_option("--out", est_out, "output directory")->required();

    // summary
    auto* sum = app.add_subcommand("summary", "export timing and mobility summaries");
    std::string sum_manifest, sum_out;
    std::string sum_policies, sum_cases, sum_mobility, sum_covariates;
    sum->add_option("--manifest", sum_manifest, "run manifest (JSON)");
    sum->add_option("--policies", sum_policies, "canonical policies file");
    sum->add_option("--cases", sum_cases, "canonical cases file");
    sum->add_option("--mobility", sum_mobility, "canonical mobility file");
    sum->add_option("--covariates", sum_covariates, "canonical covariates file");
    sum->add_option("--out", sum_out, "output directory")->required();

    // rerun
    auto* rer = app.add_subcommand("rerun", "re-execute a manifest");
    std::string rer_manifest, rer_out;
    rer->add_option("manifest", rer_manifest, "path to manifest.json")->required();
    rer->add_option("--out", rer_out, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInvalid;
    }

    try {
        if (sim->parsed())
            return cmd_simulate(read_file(sim_config), sim_out, std::cout);

        if (est->parsed()) {
            RunManifest manifest;
            if (!est_manifest.empty()) {
                manifest = RunManifest::load(est_manifest);
            } else {
                manifest.command = "estimate";
                if (opt_policies.empty() || opt_cases.empty() || opt_mobility.empty() ||
                    opt_covariates.empty())
                    fail("estimate: all four canonical input files are required");
                manifest.inputs = CanonicalPaths{opt_policies, opt_cases, opt_mobility, opt_covariates};
                if (opt_cluster != "country")
                    fail("estimate: unsupported cluster dimension '" + opt_cluster + "'");
                if (opt_all) {
                    manifest.specs = full_batch_specs();
                } else {
                    EstimationSpec spec;
                    auto policy = parse_policy(opt_policy);
                    if (!policy)
                        fail("estimate: unknown policy '" + opt_policy + "' (use --policy or --all)");
                    spec.policy = *policy;
                    auto outcome = OutcomeKind::parse(opt_outcome);
                    if (!outcome)
                        fail("estimate: unknown outcome '" + opt_outcome + "'");
                    spec.outcome = *outcome;
                    auto variant = parse_variant(opt_variant);
                    if (!variant)
                        fail("estimate: unknown variant '" + opt_variant + "'");
                    spec.variant = *variant;
                    if (!parse_window(opt_window, spec.window_lo, spec.window_hi))
                        fail("estimate: --window expects LO:HI");
                    spec.reference_event_time = opt_ref;
                    spec.validate();
                    manifest.specs = {spec};
                }
                manifest.jobs = opt_jobs;
            }
            manifest.out_dir = est_out;
            return cmd_estimate(manifest, std::cout);
        }

        if (sum->parsed()) {
            RunManifest manifest;
            if (!sum_manifest.empty()) {
                manifest = RunManifest::load(sum_manifest);
            } else {
                manifest.command = "summary";
                if (sum_policies.empty() || sum_cases.empty() || sum_mobility.empty() ||
                    sum_covariates.empty())
                    fail("summary: all four canonical input files are required");
                manifest.inputs = CanonicalPaths{sum_policies, sum_cases, sum_mobility, sum_covariates};
            }
            manifest.out_dir = sum_out;
            return cmd_summary(manifest, std::cout);
        }

        if (rer->parsed())
            return cmd_rerun(rer_manifest, rer_out, std::cout);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalid;
    }
    return kExitInvalid;
}
