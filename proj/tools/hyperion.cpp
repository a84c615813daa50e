#include <cstdio>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "hyperion/acceptance.hpp"
#include "hyperion/bundle.hpp"
#include "hyperion/errors.hpp"
#include "hyperion/hyperion_report.hpp"
#include "hyperion/io.hpp"
#include "hyperion/orbit.hpp"
#include "hyperion/presets.hpp"

namespace fs = std::filesystem;
using namespace hyperion;

namespace {

enum Exit { ok = 0, failure = 1, bad_config = 2, bad_bundle = 3, numerical = 4 };

/// A config file path, or the name of a built-in preset.
json load_config(const std::string& source) {
    if (fs::exists(source)) {
        std::ifstream in(source);
        try {
            return json::parse(in);
        } catch (const json::parse_error& e) {
            throw ConfigError(source + ": " + e.what());
        }
    }
    const std::string name = source.starts_with("preset:") ? source.substr(7) : source;
    return preset_config(name);
}

unsigned pick_threads(unsigned requested) {
    return requested ? requested : std::max(1U, std::thread::hardware_concurrency());
}

void print_json(const json& j) { std::cout << j.dump(2) << '\n'; }

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

void print_bundle(const fs::path& dir, const json& manifest, const json& summary) {
    std::cout << "bundle     " << dir.string() << '\n'
              << "experiment " << manifest["experiment"].get<std::string>() << " (" << manifest["name"].get<std::string>()
              << ")\n"
              << "hash       " << manifest["hash"].get<std::string>() << '\n'
              << "integrity  ok, " << summary["files"].size() << " data files\n";
    if (summary.contains("metrics")) {
        std::cout << "metrics\n";
        for (auto it = summary["metrics"].begin(); it != summary["metrics"].end(); ++it) {
            std::cout << "  " << it.key() << " = " << (it->is_number() ? fmt(it->get<double>()) : it->dump()) << '\n';
        }
    }
    if (summary.contains("fits")) {
        std::cout << "fits\n";
        for (auto it = summary["fits"].begin(); it != summary["fits"].end(); ++it) {
            std::cout << "  " << it.key() << ": " << it->dump() << '\n';
        }
    }
    if (summary.contains("items")) {
        // ensemble error next to the measured difference for each item
        std::cout << "sigma_m diagnostics\n";
        for (const auto& item : summary["items"]) {
            if (item.contains("early_peak")) {
                std::cout << "  beta=" << fmt(item["beta"].get<double>())
                          << " early peak " << fmt(item["early_peak"]["value"].get<double>()) << " max error "
                          << fmt(item["early_peak"]["max_error"].get<double>()) << '\n';
            }
            if (item.contains("saturation")) {
                std::cout << "  beta=" << fmt(item["beta"].get<double>()) << " saturation mean |diff| "
                          << fmt(item["saturation"]["mean_abs_diff"].get<double>()) << " max sigma_m "
                          << fmt(item["saturation"]["max_error"].get<double>()) << '\n';
            }
            if (item.contains("classical_floor")) {
                std::cout << "  point beta=" << fmt(item["beta"].get<double>()) << " xi=" << fmt(item["xi"].get<double>())
                          << " max one-norm " << fmt(item["max_one_norm"]["value"].get<double>())
                          << " classical floor " << fmt(item["classical_floor"].get<double>()) << '\n';
            }
        }
    }
    if (summary.contains("lambda")) {
        std::cout << "lambda " << fmt(summary["lambda"].get<double>()) << " +- "
                  << fmt(summary["std_error"].get<double>()) << '\n';
    }
}

int cmd_report(const fs::path& dir, bool as_json) {
    if (fs::exists(dir / "sweep.json")) {
        std::ifstream in(dir / "sweep.json");
        const json sweep = json::parse(in);
        if (sha256_file(dir / "sweep.csv") != sweep.at("sweep_csv_sha256").get<std::string>()) {
            throw IntegrityError("sweep.csv: sha256 mismatch, file was modified");
        }
        json out = {{"sweep", dir.string()}, {"points", json::array()}, {"fits", sweep["fits"]}};
        for (const auto& p : sweep["points"]) {
            const json s = verify_bundle(dir / p["dir"].get<std::string>());
            out["points"].push_back({{"dir", p["dir"]}, {"values", p["values"]}, {"metrics", s.value("metrics", json())}});
        }
        if (as_json) {
            print_json(out);
        } else {
            std::cout << "sweep " << dir.string() << ": " << out["points"].size() << " points, integrity ok\n";
            for (const auto& p : out["points"]) {
                std::cout << "  " << p["dir"].get<std::string>() << " " << p["values"].dump() << '\n';
            }
            for (auto it = out["fits"].begin(); it != out["fits"].end(); ++it) {
                std::cout << "  fit " << it.key() << ": " << it->dump() << '\n';
            }
        }
        return ok;
    }
    const json summary = verify_bundle(dir);
    std::ifstream in(dir / "manifest.json");
    const json manifest = json::parse(in);
    const auto results = bundle_criteria(manifest["name"].get<std::string>(), summary);
    if (as_json) {
        json checks = json::array();
        for (const auto& r : results) {
            json c = json::array();
            for (const auto& k : r.checks) {
                c.push_back({{"label", k.label}, {"value", k.value}, {"target", k.target}, {"pass", k.pass}});
            }
            checks.push_back({{"id", r.id}, {"pass", r.pass()}, {"checks", c}, {"note", r.note}});
        }
        print_json({{"bundle", dir.string()}, {"manifest", manifest}, {"summary", summary}, {"acceptance", checks}});
        return ok;
    }
    print_bundle(dir, manifest, summary);
    if (!results.empty()) {
        std::cout << "acceptance\n";
        for (const auto& r : results) {
            std::cout << "  " << r.line() << '\n';
        }
    }
    return ok;
}

ScalingCalibration calibration_from(const std::vector<std::string>& dirs, ScalingCalibration cal) {
    for (const auto& d : dirs) {
        const json s = verify_bundle(d);
        if (s.contains("/fits/max_prefactor_two_thirds"_json_pointer)) {
            cal.jz_prefactor = s["fits"]["max_prefactor_two_thirds"].get<double>();
            cal.source = "bundles";
        }
        if (s.contains("/fits/max_prefactor_one_sixth"_json_pointer)) {
            cal.norm_prefactor = s["fits"]["max_prefactor_one_sixth"].get<double>();
            cal.source = "bundles";
        }
    }
    return cal;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quantum and classical dynamics of a tidally driven rotor"};
    app.require_subcommand(1);

    unsigned threads = 0;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    std::string root;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--seed", seed, "Master seed (overrides the config)");
        sub->add_option("--threads", threads, "Worker threads (default: all cores)");
        sub->add_option("--out", out_dir, "Output directory (default: <root>/<name>-<hash>)");
        sub->add_option("--root", root, "Output root (default: $HYPERION_OUTPUT_ROOT or ./runs)");
    };

    std::string config_source;
    auto* run = app.add_subcommand("run", "Run one experiment into a bundle");
    run->add_option("config", config_source, "Config file or preset name")->required();
    common(run);

    std::vector<std::string> axis_specs;
    auto* sweep = app.add_subcommand("sweep", "Run a parameter sweep");
    sweep->add_option("config", config_source, "Config file or preset name")->required();
    sweep->add_option("--axis", axis_specs, "key=v1,v2,... (repeat for a Cartesian product)")->required();
    common(sweep);

    std::string report_dir;
    bool as_json = false;
    auto* report = app.add_subcommand("report", "Verify a bundle or sweep and summarize it");
    report->add_option("dir", report_dir)->required()->check(CLI::ExistingDirectory);
    report->add_flag("--json", as_json, "Machine-readable output");

    ScalingCalibration cal;
    BodyParams body;
    DustParams dust;
    std::vector<std::string> calib_dirs;
    auto* hrep = app.add_subcommand("hyperion-report", "Physical parameters of Hyperion and extrapolated QC differences");
    hrep->add_flag("--json", as_json, "Machine-readable output");
    hrep->add_option("--jz-prefactor", cal.jz_prefactor, "C in max <Jz> difference = C beta^(2/3)");
    hrep->add_option("--norm-prefactor", cal.norm_prefactor, "C in max |qm-cl|_1 = C (beta^2/D)^(1/6)");
    hrep->add_option("--calibrate", calib_dirs, "Take prefactors from chaotic_means / decoherence bundles");
    hrep->add_option("--density", body.density, "kg/m^3");
    hrep->add_option("--r1", body.r1, "semi-axis, m");
    hrep->add_option("--r2", body.r2, "semi-axis, m");
    hrep->add_option("--r3", body.r3, "semi-axis, m");
    hrep->add_option("--period", body.period, "orbital period, s");
    hrep->add_option("--dust-density", dust.number_density, "grains per m^3");
    hrep->add_option("--grain-mass", dust.grain_mass, "kg");
    hrep->add_option("--grain-radius", dust.grain_radius, "m");
    hrep->add_option("--temperature", dust.temperature, "K");
    hrep->add_option("--body-radius", dust.body_radius, "m");

    OrbitParams orbit_params;
    std::string orbit_out;
    auto* odump = app.add_subcommand("orbit-dump", "Write the orbit table as CSV (tau, r_over_a, theta)");
    odump->add_option("--e", orbit_params.eccentricity, "Eccentricity");
    odump->add_option("--samples", orbit_params.n_samples, "Table size");
    odump->add_option("--out", orbit_out, "Output file (default: stdout)");

    std::string preset_dir;
    auto* presets = app.add_subcommand("presets", "List the built-in presets, or write them as config files");
    presets->add_option("--write", preset_dir, "Directory to write <name>.json files into");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run || *sweep) {
            json cfg = load_config(config_source);
            if (seed) {
                cfg["seed"] = *seed;
            }
            const fs::path out_root = root.empty() ? default_output_root() : fs::path(root);
            if (*run) {
                const ExperimentConfig parsed = parse_experiment(cfg);
                const fs::path dir = out_dir.empty() ? bundle_dir(parsed, out_root) : fs::path(out_dir);
                if (dir.has_parent_path()) {
                    fs::create_directories(dir.parent_path());
                }
                const BundleResult r = run_bundle(parsed, dir, pick_threads(threads));
                std::cout << (r.reused ? "up to date: " : "wrote: ") << r.dir.string() << '\n';
                return ok;
            }
            std::vector<SweepAxis> axes;
            for (const auto& a : axis_specs) {
                axes.push_back(parse_axis(a));
            }
            const ExperimentConfig parsed = parse_experiment(cfg);
            const fs::path dir = out_dir.empty()
                                     ? out_root / (parsed.name + "-sweep-" + manifest_hash(parsed.normalized).substr(0, 12))
                                     : fs::path(out_dir);
            const SweepResult r = run_sweep(cfg, axes, dir, pick_threads(threads));
            std::size_t reused = 0;
            for (const auto& p : r.points) {
                reused += p.reused ? 1 : 0;
            }
            std::cout << "wrote: " << r.dir.string() << " (" << r.points.size() << " points, " << reused
                      << " already complete)\n";
            return ok;
        }
        if (*report) {
            return cmd_report(report_dir, as_json);
        }
        if (*hrep) {
            const json r = hyperion_report(body, dust, calibration_from(calib_dirs, cal));
            if (as_json) {
                print_json(r);
            } else {
                std::cout << format_hyperion_report(r);
            }
            return ok;
        }
        if (*odump) {
            const OrbitSolution orbit = build_orbit_table(orbit_params);
            std::ofstream file;
            if (!orbit_out.empty()) {
                file.open(orbit_out);
            }
            std::ostream& os = orbit_out.empty() ? std::cout : file;
            os << "# hyperion-csv v" << csv_format_version << " kind=orbit e="
               << format_double(orbit_params.eccentricity) << '\n'
               << "tau,r_over_a,theta\n";
            for (std::size_t i = 0; i < orbit.size(); ++i) {
                os << format_double(orbit.tau_grid()[i]) << ',' << format_double(orbit.r_over_a()[i]) << ','
                   << format_double(orbit.theta()[i]) << '\n';
            }
            return ok;
        }
        if (*presets) {
            for (const auto& name : preset_names()) {
                if (preset_dir.empty()) {
                    std::cout << name << '\n';
                    continue;
                }
                fs::create_directories(preset_dir);
                std::ofstream f(fs::path(preset_dir) / (name + ".json"));
                f << preset_config(name).dump(2) << '\n';
            }
            return ok;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return bad_config;
    } catch (const IntegrityError& e) {
        std::cerr << "integrity error: " << e.what() << '\n';
        return bad_bundle;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return numerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return failure;
    }
    return ok;
}
