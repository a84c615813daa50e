#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "hyperion/config.hpp"
#include "hyperion/experiments.hpp"

namespace hyperion {

/// Tag folded into every manifest hash. Bump when outputs change meaning.
inline constexpr std::string_view code_version = "hyperion-1.0.0";

/// Bundle files are missing, altered or inconsistent with their manifest.
class IntegrityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// sha256 over the compact normalized config and the code version.
std::string manifest_hash(const json& normalized);

/// $HYPERION_OUTPUT_ROOT, else ./runs.
std::filesystem::path default_output_root();

/// <root>/<name>-<first 12 hex digits of the hash>
std::filesystem::path bundle_dir(const ExperimentConfig& config, const std::filesystem::path& root);

struct BundleResult {
    std::filesystem::path dir;
    json summary;
    bool reused = false;  ///< an intact bundle with the same hash was already there
};

/// Runs one experiment into `dir`. Work happens in `<dir>.partial`, which is
/// renamed on success and removed on failure. An existing intact bundle with
/// the same manifest hash is reused; any other existing content is rejected.
BundleResult run_bundle(const ExperimentConfig& config, const std::filesystem::path& dir,
                        unsigned threads);

/// Manifest written as manifest.json.
json make_manifest(const ExperimentConfig& config, const std::filesystem::path& dir);

/// Checks the manifest hash and the sha256 of every listed data file.
/// Returns the summary; throws IntegrityError naming the first problem.
json verify_bundle(const std::filesystem::path& dir);

/// One sweep axis: a dotted config path and its values.
struct SweepAxis {
    std::string path;
    std::vector<json> values;
};

/// Parses "key=v1,v2,...". Values are read as JSON where possible, else as
/// strings.
SweepAxis parse_axis(std::string_view spec);

struct SweepResult {
    std::filesystem::path dir;
    std::vector<BundleResult> points;
    json aggregate;
};

/// Cartesian product of the axes, one bundle per point under `dir`. Point i
/// runs with seed derive_seed(master, sweep_point, i); a single-point sweep
/// keeps the master seed, so it is byte-identical to `run`. Completed points
/// whose manifests match are skipped. Two points with the same manifest are
/// rejected. Writes sweep.json and the aggregated sweep.csv of metrics.
SweepResult run_sweep(const json& base, const std::vector<SweepAxis>& axes,
                      const std::filesystem::path& dir, unsigned threads);

/// Writes `value` at a dotted path, wrapping scalars as one-element arrays
/// when the existing value is an array.
void set_path(json& config, const std::string& path, const json& value);

}  // namespace hyperion
