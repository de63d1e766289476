#pragma once

#include "evpanel/design.hpp"
#include "evpanel/ingest.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace evpanel {

inline constexpr std::string_view kToolVersion = "0.1.0";

/// Exit codes shared by every command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitPartialFailure = 1;
inline constexpr int kExitInvalid = 2;

/// Recipe for one run. A copy is written into every output directory as
/// manifest.json; re-running a manifest reproduces every output file
/// byte-for-byte. Simulation configs are embedded verbatim so the manifest
/// stays self-contained; estimation inputs are referenced by path.
struct RunManifest {
    std::string command; // "estimate", "summary", or "simulate"
    std::optional<CanonicalPaths> inputs;
    std::string sim_config_json; // embedded config object (simulate only)
    std::vector<EstimationSpec> specs;

    /// Spec entries that failed to parse. They are kept verbatim (and
    /// re-serialized verbatim) so a rerun fails them identically instead of
    /// aborting the whole batch.
    struct InvalidSpec {
        std::string raw_json;
        std::string tag;
        std::string error;
    };
    std::vector<InvalidSpec> invalid_specs;

    std::filesystem::path out_dir; // runtime only, never serialized
    int jobs = 1;
    std::uint64_t seed = 0; // mirrors the simulation config seed
    std::string tool_version{kToolVersion};

    std::string to_json() const;
    static RunManifest parse_json(const std::string& text);
    static RunManifest load(const std::filesystem::path& path);
};

/// The full 8-policy x 7-outcome batch of §-default specs (cases plus the
/// six mobility categories), eq3 variant.
std::vector<EstimationSpec> full_batch_specs();

/// Runs every spec against the ingested panel; one coefficient file and one
/// diagnostics file per spec. A failing spec is recorded and the rest still
/// run. Returns kExitOk or kExitPartialFailure.
int cmd_estimate(const RunManifest& manifest, std::ostream& log);

/// Emits the implementation-timing distribution per policy and the
/// per-category mobility values split before/after the first case.
int cmd_summary(const RunManifest& manifest, std::ostream& log);

/// Runs a simulation config (JSON text) and writes the canonical files plus
/// the truth record.
int cmd_simulate(const std::string& config_json, const std::filesystem::path& out_dir,
                 std::ostream& log);

/// Re-executes the manifest found in `manifest_path` into `out_dir`.
int cmd_rerun(const std::filesystem::path& manifest_path, const std::filesystem::path& out_dir,
              std::ostream& log);

} // namespace evpanel
