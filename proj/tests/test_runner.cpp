#include "evpanel/runner.hpp"

#include "evpanel/error.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <fstream>
#include <map>
#include <set>
#include <sstream>

using namespace evpanel;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Byte map of every regular file in a directory (relative path -> content).
std::map<std::string, std::string> dir_bytes(const std::filesystem::path& dir) {
    std::map<std::string, std::string> out;
    for (const auto& entry : std::filesystem::recursive_directory_iterator(dir))
        if (entry.is_regular_file())
            out[std::filesystem::relative(entry.path(), dir).string()] = slurp(entry.path());
    return out;
}

const char* kLinearConfig = R"({
  "type": "linear",
  "seed": 31,
  "n_countries": 10,
  "n_days": 60,
  "policy": "events_cancellation",
  "variant": "eq3",
  "window": [-8, 12],
  "noise_sd": 0.2,
  "timing": {
    "travel_controls": {"impl_lo": 2, "impl_hi": 5},
    "transport_closure": {"impl_lo": 12, "impl_hi": 40},
    "events_cancellation": {"impl_lo": 12, "impl_hi": 40},
    "gatherings_restrictions": {"impl_lo": 12, "impl_hi": 40},
    "school_closure": {"impl_lo": 12, "impl_hi": 40},
    "workplace_closure": {"impl_lo": 12, "impl_hi": 40},
    "stay_at_home": {"impl_lo": 12, "impl_hi": 40},
    "internal_movement": {"impl_lo": 12, "impl_hi": 40}
  }
})";

std::stringstream devnull;

} // namespace

TEST_CASE("simulate writes canonical files, truth, and manifest; rerun is byte-identical") {
    const auto dir1 = testing::scratch_dir("sim1");
    const auto dir2 = testing::scratch_dir("sim2");
    REQUIRE(cmd_simulate(kLinearConfig, dir1, devnull) == kExitOk);
    for (const char* name :
         {"policies.csv", "cases.csv", "mobility.csv", "covariates.csv", "truth.json",
          "manifest.json"})
        CHECK(std::filesystem::exists(dir1 / name));

    REQUIRE(cmd_rerun(dir1 / "manifest.json", dir2, devnull) == kExitOk);
    CHECK(dir_bytes(dir1) == dir_bytes(dir2));
    std::filesystem::remove_all(dir1);
    std::filesystem::remove_all(dir2);
}

TEST_CASE("estimate batch: outputs, determinism under parallelism, isolation of failures") {
    const auto sim_dir = testing::scratch_dir("est_sim");
    REQUIRE(cmd_simulate(kLinearConfig, sim_dir, devnull) == kExitOk);

    RunManifest manifest;
    manifest.command = "estimate";
    manifest.inputs = CanonicalPaths::in_dir(sim_dir);
    EstimationSpec good;
    good.policy = PolicyKind::EventsCancellation;
    good.outcome = OutcomeKind::mobility(MobilityCategory::Residential);
    good.window_lo = -8;
    good.window_hi = 12;
    good.reference_event_time = -8;
    EstimationSpec good2 = good;
    good2.variant = SpecVariant::SingleEventIntensity;
    EstimationSpec failing = good;
    failing.outcome = OutcomeKind::mobility(MobilityCategory::Parks); // no data: empty sample
    manifest.specs = {good, good2, failing};

    const auto out1 = testing::scratch_dir("est_out1");
    manifest.out_dir = out1;
    CHECK(cmd_estimate(manifest, devnull) == kExitPartialFailure);
    CHECK(std::filesystem::exists(out1 / ("coeffs_" + good.tag() + ".csv")));
    CHECK(std::filesystem::exists(out1 / ("diag_" + good2.tag() + ".csv")));
    CHECK(!std::filesystem::exists(out1 / ("coeffs_" + failing.tag() + ".csv")));
    const std::string errors = slurp(out1 / "errors.csv");
    CHECK(errors.find(failing.tag()) != std::string::npos);

    // parallel rerun from the written manifest is byte-identical
    RunManifest reloaded = RunManifest::load(out1 / "manifest.json");
    reloaded.jobs = 4;
    const auto out2 = testing::scratch_dir("est_out2");
    reloaded.out_dir = out2;
    CHECK(cmd_estimate(reloaded, devnull) == kExitPartialFailure);
    auto bytes1 = dir_bytes(out1);
    auto bytes2 = dir_bytes(out2);
    bytes1.erase("manifest.json"); // jobs field differs by construction here
    bytes2.erase("manifest.json");
    CHECK(bytes1 == bytes2);

    std::filesystem::remove_all(sim_dir);
    std::filesystem::remove_all(out1);
    std::filesystem::remove_all(out2);
}

TEST_CASE("coefficient files sort by j and carry a zero reference row") {
    const auto sim_dir = testing::scratch_dir("coef_sim");
    REQUIRE(cmd_simulate(kLinearConfig, sim_dir, devnull) == kExitOk);
    RunManifest manifest;
    manifest.command = "estimate";
    manifest.inputs = CanonicalPaths::in_dir(sim_dir);
    EstimationSpec spec;
    spec.policy = PolicyKind::EventsCancellation;
    spec.outcome = OutcomeKind::mobility(MobilityCategory::Residential);
    spec.window_lo = -8;
    spec.window_hi = 12;
    spec.reference_event_time = -8;
    manifest.specs = {spec};
    const auto out = testing::scratch_dir("coef_out");
    manifest.out_dir = out;
    REQUIRE(cmd_estimate(manifest, devnull) == kExitOk);

    std::ifstream in(out / ("coeffs_" + spec.tag() + ".csv"));
    std::string line;
    std::getline(in, line);
    CHECK(line == "j,alpha,se,ci_lo,ci_hi,beta,beta_se");
    int expected_j = -8;
    while (std::getline(in, line)) {
        CHECK(line.substr(0, line.find(',')) == std::to_string(expected_j));
        if (expected_j == -8) {
            // reference row: alpha 0, se 0
            CHECK(line.substr(0, 7) == "-8,0,0,");
        }
        ++expected_j;
    }
    CHECK(expected_j == 13);
    std::filesystem::remove_all(sim_dir);
    std::filesystem::remove_all(out);
}

TEST_CASE("manifest with an unknown policy fails that spec and completes the rest") {
    const auto sim_dir = testing::scratch_dir("badspec_sim");
    REQUIRE(cmd_simulate(kLinearConfig, sim_dir, devnull) == kExitOk);
    const auto paths = CanonicalPaths::in_dir(sim_dir);
    const std::string manifest_json = std::string(R"({
      "command": "estimate",
      "inputs": {
        "policies": ")") + paths.policies.string() + R"(",
        "cases": ")" + paths.cases.string() + R"(",
        "mobility": ")" + paths.mobility.string() + R"(",
        "covariates": ")" + paths.covariates.string() + R"("
      },
      "specs": [
        {"policy": "curfew", "outcome": "mobility_residential",
         "window_lo": -8, "window_hi": 12, "reference": -8},
        {"policy": "events_cancellation", "outcome": "mobility_residential",
         "window_lo": -8, "window_hi": 12, "reference": -8}
      ]
    })";
    RunManifest manifest = RunManifest::parse_json(manifest_json);
    const auto out = testing::scratch_dir("badspec_out");
    manifest.out_dir = out;
    CHECK(cmd_estimate(manifest, devnull) == kExitPartialFailure);
    CHECK(std::filesystem::exists(out / "coeffs_events_cancellation_mobility_residential_eq3.csv"));
    const std::string errors = slurp(out / "errors.csv");
    CHECK(errors.find("curfew") != std::string::npos);
    std::filesystem::remove_all(sim_dir);
    std::filesystem::remove_all(out);
}

TEST_CASE("summary emits implementation offsets and mobility splits") {
    const auto sim_dir = testing::scratch_dir("sum_sim");
    REQUIRE(cmd_simulate(kLinearConfig, sim_dir, devnull) == kExitOk);
    RunManifest manifest;
    manifest.command = "summary";
    manifest.inputs = CanonicalPaths::in_dir(sim_dir);
    const auto out = testing::scratch_dir("sum_out");
    manifest.out_dir = out;
    REQUIRE(cmd_summary(manifest, devnull) == kExitOk);

    const std::string offsets = slurp(out / "summary_policy_offsets.csv");
    CHECK(offsets.find("events_cancellation,") != std::string::npos);
    const std::string split = slurp(out / "summary_mobility_split.csv");
    CHECK(split.find("residential,") != std::string::npos);
    CHECK(split.find(",after,") != std::string::npos);
    std::filesystem::remove_all(sim_dir);
    std::filesystem::remove_all(out);
}

TEST_CASE("full batch enumerates 8 policies x 7 outcomes") {
    const auto specs = full_batch_specs();
    CHECK(specs.size() == 56);
    std::set<std::string> tags;
    for (const auto& spec : specs)
        tags.insert(spec.tag());
    CHECK(tags.size() == 56);
}

TEST_CASE("invalid simulation config is rejected") {
    const auto dir = testing::scratch_dir("badcfg");
    CHECK_THROWS_AS(cmd_simulate("{\"type\": \"magic\"}", dir, devnull), Error);
    CHECK_THROWS_AS(cmd_simulate("not json", dir, devnull), Error);
    std::filesystem::remove_all(dir);
}

TEST_CASE("manifest JSON survives a round trip") {
    RunManifest m;
    m.command = "estimate";
    m.inputs = CanonicalPaths{"a.csv", "b.csv", "c.csv", "d.csv"};
    m.specs = full_batch_specs();
    m.jobs = 3;
    const RunManifest back = RunManifest::parse_json(m.to_json());
    CHECK(back.command == m.command);
    REQUIRE(back.inputs.has_value());
    CHECK(back.inputs->cases == m.inputs->cases);
    REQUIRE(back.specs.size() == m.specs.size());
    for (std::size_t i = 0; i < m.specs.size(); ++i)
        CHECK(back.specs[i].tag() == m.specs[i].tag());
    CHECK(back.jobs == 3);
}
