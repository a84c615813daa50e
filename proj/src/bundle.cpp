#include "hyperion/bundle.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "hyperion/analysis.hpp"
#include "hyperion/errors.hpp"
#include "hyperion/io.hpp"
#include "hyperion/rng.hpp"

namespace hyperion {

namespace fs = std::filesystem;

namespace {

void write_json(const fs::path& path, const json& value) {
    std::ofstream out(path, std::ios::binary);
    out << value.dump(2) << '\n';
    if (!out) {
        throw std::runtime_error(path.string() + ": write failed");
    }
}

json read_json(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IntegrityError(path.string() + ": missing");
    }
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw IntegrityError(path.string() + ": not valid JSON (" + e.what() + ")");
    }
}

/// Data files in a bundle directory, sorted by name.
std::vector<std::string> data_files(const fs::path& dir) {
    std::vector<std::string> names;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const auto ext = entry.path().extension();
        if (entry.is_regular_file() && (ext == ".csv" || ext == ".bin")) {
            names.push_back(entry.path().filename().string());
        }
    }
    std::sort(names.begin(), names.end());
    return names;
}

bool is_intact(const fs::path& dir, const std::string& hash) {
    try {
        verify_bundle(dir);
        return read_json(dir / "manifest.json").at("hash").get<std::string>() == hash;
    } catch (const std::exception&) {
        return false;
    }
}

std::string hash12(const std::string& h) { return h.substr(0, 12); }

}  // namespace

std::string manifest_hash(const json& normalized) {
    return sha256_hex(normalized.dump() + "\n" + std::string(code_version));
}

fs::path default_output_root() {
    if (const char* env = std::getenv("HYPERION_OUTPUT_ROOT"); env && *env) {
        return env;
    }
    return "runs";
}

fs::path bundle_dir(const ExperimentConfig& config, const fs::path& root) {
    return root / (config.name + "-" + hash12(manifest_hash(config.normalized)));
}

json make_manifest(const ExperimentConfig& c, const fs::path& dir) {
    json m = {{"format", "hyperion-bundle"},
              {"format_version", csv_format_version},
              {"experiment", std::string(to_string(c.kind))},
              {"name", c.name},
              {"seed", c.seed},
              {"code_version", std::string(code_version)},
              {"hash", manifest_hash(c.normalized)},
              {"output_directory", dir.filename().string()},
              {"config", c.normalized}};
    if (c.kind == ExperimentKind::comparison || c.kind == ExperimentKind::decoherence ||
        c.kind == ExperimentKind::classical_decay || c.kind == ExperimentKind::unitarity ||
        c.kind == ExperimentKind::first_integral) {
        m["record_times"] = c.record_times();
    }
    return m;
}

BundleResult run_bundle(const ExperimentConfig& config, const fs::path& dir, unsigned threads) {
    const std::string hash = manifest_hash(config.normalized);
    if (fs::exists(dir)) {
        if (fs::exists(dir / "manifest.json") && is_intact(dir, hash)) {
            return {dir, read_json(dir / "summary.json"), true};
        }
        throw ConfigError(dir.string() + ": output path exists and does not hold this manifest");
    }
    fs::path partial = dir;
    partial += ".partial";
    fs::remove_all(partial);
    fs::create_directories(partial);
    try {
        write_json(partial / "manifest.json", make_manifest(config, dir));
        const auto start = std::chrono::steady_clock::now();
        json summary = run_experiment(config, partial, threads);
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        json files = json::object();
        for (const auto& name : data_files(partial)) {
            files[name] = sha256_file(partial / name);
        }
        summary["files"] = files;
        summary["manifest_hash"] = hash;
        write_json(partial / "summary.json", summary);
        // runtimes vary between runs, so they live outside the deterministic files
        write_json(partial / "timing.json", {{"seconds", seconds}, {"threads", threads}});
        fs::rename(partial, dir);
        return {dir, summary, false};
    } catch (...) {
        std::error_code ec;
        fs::remove_all(partial, ec);
        throw;
    }
}

json verify_bundle(const fs::path& dir) {
    if (!fs::is_directory(dir)) {
        throw IntegrityError(dir.string() + ": not a directory");
    }
    const json manifest = read_json(dir / "manifest.json");
    const json summary = read_json(dir / "summary.json");
    if (!manifest.contains("config") || !manifest.contains("hash")) {
        throw IntegrityError("manifest.json: missing config or hash");
    }
    if (manifest_hash(manifest["config"]) != manifest["hash"].get<std::string>() ||
        manifest["code_version"] != std::string(code_version)) {
        throw IntegrityError("manifest.json: hash does not match its config or code version");
    }
    if (summary.value("manifest_hash", "") != manifest["hash"].get<std::string>()) {
        throw IntegrityError("summary.json: belongs to a different manifest");
    }
    const json& files = summary.at("files");
    for (auto it = files.begin(); it != files.end(); ++it) {
        const fs::path p = dir / it.key();
        if (!fs::exists(p)) {
            throw IntegrityError(it.key() + ": missing");
        }
        if (sha256_file(p) != it->get<std::string>()) {
            throw IntegrityError(it.key() + ": sha256 mismatch, file was modified");
        }
    }
    for (const auto& name : data_files(dir)) {
        if (!files.contains(name)) {
            throw IntegrityError(name + ": not listed in summary.json");
        }
    }
    return summary;
}

SweepAxis parse_axis(std::string_view spec) {
    const auto eq = spec.find('=');
    if (eq == std::string_view::npos || eq == 0 || eq + 1 == spec.size()) {
        throw ConfigError("--axis: expected key=v1,v2,... but got '" + std::string(spec) + "'");
    }
    SweepAxis axis{std::string(spec.substr(0, eq)), {}};
    std::stringstream ss{std::string(spec.substr(eq + 1))};
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) {
            throw ConfigError("--axis " + axis.path + ": empty value");
        }
        json v = json::parse(item, nullptr, false);
        axis.values.push_back(v.is_discarded() ? json(item) : v);
    }
    return axis;
}

void set_path(json& config, const std::string& path, const json& value) {
    json* node = &config;
    std::stringstream ss(path);
    std::string part;
    std::vector<std::string> parts;
    while (std::getline(ss, part, '.')) {
        parts.push_back(part);
    }
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
        node = &(*node)[parts[i]];
        if (node->is_null()) {
            *node = json::object();
        }
        if (!node->is_object()) {
            throw ConfigError(path + ": '" + parts[i] + "' is not an object");
        }
    }
    json& slot = (*node)[parts.back()];
    slot = slot.is_array() && !value.is_array() ? json::array({value}) : value;
}

namespace {

ExperimentConfig parse_experiment_or_point(const json& cfg, std::size_t i) {
    try {
        return parse_experiment(cfg);
    } catch (const ConfigError& e) {
        throw ConfigError("sweep point " + std::to_string(i) + ": " + e.what());
    }
}

}  // namespace

SweepResult run_sweep(const json& base, const std::vector<SweepAxis>& axes, const fs::path& dir,
                      unsigned threads) {
    if (axes.empty()) {
        throw ConfigError("sweep: at least one --axis is required");
    }
    std::size_t total = 1;
    for (const auto& a : axes) {
        if (a.values.empty()) {
            throw ConfigError("--axis " + a.path + ": no values");
        }
        total *= a.values.size();
    }
    const ExperimentConfig master = parse_experiment(base);

    std::vector<ExperimentConfig> configs;
    std::vector<std::vector<json>> coords;
    std::set<std::string> hashes;
    for (std::size_t i = 0; i < total; ++i) {
        json cfg = master.normalized;
        std::vector<json> at;
        std::size_t rest = i;
        for (auto a = axes.rbegin(); a != axes.rend(); ++a) {
            const json& v = a->values[rest % a->values.size()];
            rest /= a->values.size();
            set_path(cfg, a->path, v);
            at.insert(at.begin(), v);
        }
        // compared before the per-point seed and name make every point distinct
        if (!hashes.insert(manifest_hash(parse_experiment_or_point(cfg, i).normalized)).second) {
            throw ConfigError("sweep point " + std::to_string(i) + ": duplicates an earlier point");
        }
        if (total > 1) {
            cfg["seed"] = derive_seed(master.seed, seed_domain::sweep_point, i);
            cfg["name"] = master.name + "-p" + std::to_string(i);
        }
        configs.push_back(parse_experiment_or_point(cfg, i));
        coords.push_back(std::move(at));
    }

    fs::create_directories(dir);
    SweepResult out;
    out.dir = dir;
    std::set<std::string> metric_names;
    for (std::size_t i = 0; i < total; ++i) {
        out.points.push_back(run_bundle(configs[i], bundle_dir(configs[i], dir), threads));
        const json& m = out.points.back().summary.value("metrics", json::object());
        for (auto it = m.begin(); it != m.end(); ++it) {
            if (it->is_number()) {
                metric_names.insert(it.key());
            }
        }
    }

    // aggregated metrics table; non-numeric axis values are recorded as their index
    std::vector<std::string> cols = {"point"};
    for (const auto& a : axes) {
        cols.push_back(a.path);
    }
    cols.insert(cols.end(), metric_names.begin(), metric_names.end());
    {
        CsvWriter w(dir / "sweep.csv", "sweep", cols, {{"points", std::to_string(total)}});
        std::vector<double> row(cols.size());
        for (std::size_t i = 0; i < total; ++i) {
            row[0] = static_cast<double>(i);
            for (std::size_t a = 0; a < axes.size(); ++a) {
                const json& v = coords[i][a];
                if (v.is_number()) {
                    row[1 + a] = v.get<double>();
                } else {
                    const auto& vals = axes[a].values;
                    row[1 + a] = static_cast<double>(std::find(vals.begin(), vals.end(), v) - vals.begin());
                }
            }
            const json& m = out.points[i].summary.value("metrics", json::object());
            std::size_t k = 1 + axes.size();
            for (const auto& name : metric_names) {
                row[k++] = m.contains(name) && m[name].is_number() ? m[name].get<double>()
                                                                   : std::numeric_limits<double>::quiet_NaN();
            }
            w.row(row);
        }
        w.close();
    }

    json points = json::array();
    for (std::size_t i = 0; i < total; ++i) {
        points.push_back({{"point", i},
                          {"values", coords[i]},
                          {"dir", out.points[i].dir.filename().string()},
                          {"hash", manifest_hash(configs[i].normalized)},
                          {"reused", out.points[i].reused}});
    }
    json fits = json::object();
    if (axes.size() == 1 && total >= 3 &&
        std::all_of(axes[0].values.begin(), axes[0].values.end(), [](const json& v) { return v.is_number(); })) {
        std::vector<double> x;
        for (const auto& v : axes[0].values) {
            x.push_back(v.get<double>());
        }
        for (const auto& name : metric_names) {
            std::vector<double> y;
            for (const auto& p : out.points) {
                const json& m = p.summary.value("metrics", json::object());
                y.push_back(m.contains(name) ? m[name].get<double>() : 0.0);
            }
            try {
                const ScalingFit f = fit_power_law(x, y);
                fits[name] = {{"exponent", f.exponent}, {"prefactor", f.prefactor}, {"r_squared", f.r_squared}};
            } catch (const AnalysisError&) {
                // non-positive metrics have no power law
            }
        }
    }
    out.aggregate = {{"format", "hyperion-sweep"},
                     {"base", master.normalized},
                     {"axes", json::array()},
                     {"points", points},
                     {"fits", fits},
                     {"sweep_csv_sha256", sha256_file(dir / "sweep.csv")}};
    for (const auto& a : axes) {
        out.aggregate["axes"].push_back({{"path", a.path}, {"values", a.values}});
    }
    write_json(dir / "sweep.json", out.aggregate);
    return out;
}

}  // namespace hyperion
