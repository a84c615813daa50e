// Runs the experiment presets and prints one PASS/FAIL line per criterion.
// Bundles are cached under the output root and reused when their manifest
// hash matches; delete the root to force a fresh run.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <set>
#include <thread>

#include <CLI11.hpp>

#include "hyperion/acceptance.hpp"
#include "hyperion/bundle.hpp"
#include "hyperion/hyperion_report.hpp"
#include "hyperion/io.hpp"
#include "hyperion/presets.hpp"

namespace fs = std::filesystem;
using namespace hyperion;

namespace {

struct Runner {
    fs::path root;
    unsigned threads = 1;
    std::map<std::string, json> cache;

    const json& summary(const std::string& preset) {
        auto it = cache.find(preset);
        if (it != cache.end()) {
            return it->second;
        }
        const ExperimentConfig c = parse_experiment(preset_config(preset));
        const auto start = std::chrono::steady_clock::now();
        const BundleResult r = run_bundle(c, bundle_dir(c, root), threads);
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::fprintf(stderr, "  [%s %s in %.1f s]\n", preset.c_str(), r.reused ? "reused" : "ran", s);
        return cache.emplace(preset, r.summary).first->second;
    }
};

/// sha256 of every data file and summary.json.
std::map<std::string, std::string> output_hashes(const fs::path& dir) {
    std::map<std::string, std::string> h;
    for (const auto& e : fs::directory_iterator(dir)) {
        const auto ext = e.path().extension();
        if (ext == ".csv" || ext == ".bin" || e.path().filename() == "summary.json") {
            h[e.path().filename().string()] = sha256_file(e.path());
        }
    }
    return h;
}

CriterionResult check_determinism(const fs::path& root) {
    CriterionResult r{"P12", {}, ""};
    const json configs[] = {
        {{"experiment", "comparison"},
         {"name", "det-comparison"},
         {"system", {{"dtau", 0.01}}},
         {"classical", {{"ensemble_size", 20000}}},
         {"betas", {0.1, 0.05}},
         {"record", {{"tau_end", 3.0}, {"every", 0.1}}},
         {"distributions_at", {3.0}},
         {"smoothing", {0.25}},
         {"snapshots", {{"format", "binary"}, {"at", {1.0}}}}},
        {{"experiment", "decoherence"},
         {"name", "det-decoherence"},
         {"system", {{"dtau", 0.005}}},
         {"quantum", {{"dtau", 2e-3}}},
         {"classical", {{"ensemble_size", 2000}}},
         {"realizations", 8},
         {"record", {{"tau_end", 2.0}, {"every", 0.1}}},
         {"points",
          {{{"beta", 0.1}, {"tau_c", 0.01}, {"noise", {{"sigma_over_vch", 0.012}}}},
           {{"beta", 0.1}, {"tau_c", 0.02}, {"noise", {{"sigma_over_vch", 0.012}}}}}}},
        {{"experiment", "classical_decay"},
         {"name", "det-decay"},
         {"system", {{"dtau", 0.005}}},
         {"classical", {{"ensemble_size", 20000}}},
         {"betas", {0.05}},
         {"noise", {{"sigma_over_vch", 0.012}, {"tau_c", 0.01}}},
         {"record", {{"tau_end", 2.0}, {"every", 0.25}}}},
    };
    int files = 0;
    int differing = 0;
    for (const auto& cfg : configs) {
        const ExperimentConfig c = parse_experiment(cfg);
        std::map<std::string, std::string> first;
        for (unsigned t : {1U, 2U, 5U}) {
            const fs::path dir = root / "determinism" / (c.name + "-t" + std::to_string(t));
            fs::remove_all(dir);
            fs::create_directories(dir.parent_path());
            run_bundle(c, dir, t);
            const auto h = output_hashes(dir);
            if (first.empty()) {
                first = h;
                files += static_cast<int>(h.size());
                continue;
            }
            for (const auto& [name, sha] : first) {
                differing += (h.count(name) == 0 || h.at(name) != sha) ? 1 : 0;
            }
        }
    }
    r.checks.push_back({"files compared", static_cast<double>(files), ">0", files > 0});
    r.checks.push_back({"files differing across 1/2/5 workers", static_cast<double>(differing), "0", differing == 0});
    return r;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance criteria P1-P12"};
    std::string root = (fs::temp_directory_path() / "hyperion-acceptance").string();
    unsigned threads = 0;
    std::vector<std::string> only;
    app.add_option("--root", root, "Bundle cache directory");
    app.add_option("--threads", threads, "Worker threads (default: all cores)");
    app.add_option("--only", only, "Subset of criteria, e.g. P1 P4")->delimiter(',');
    CLI11_PARSE(app, argc, argv);

    Runner run{root, threads ? threads : std::max(1U, std::thread::hardware_concurrency()), {}};
    fs::create_directories(run.root);
    const std::set<std::string> wanted(only.begin(), only.end());
    auto want = [&](const std::string& id) { return wanted.empty() || wanted.count(id) > 0; };

    using Eval = std::function<CriterionResult()>;
    const std::vector<std::pair<std::string, Eval>> criteria = {
        {"P1", [&] { return check_unitarity(run.summary("unitarity")); }},
        {"P2", [&] { return check_first_integral(run.summary("first_integral")); }},
        {"P3", [&] { return check_lyapunov(run.summary("lyapunov")); }},
        {"P4", [&] { return check_early_scaling(run.summary("regular_means"), run.summary("chaotic_early")); }},
        {"P5",
         [&] {
             const double lambda = run.summary("lyapunov")["lambda"].get<double>();
             return check_growth_saturation(run.summary("chaotic_growth"), run.summary("chaotic_means"), lambda);
         }},
        {"P6", [&] { return check_saturation_scaling(run.summary("chaotic_means")); }},
        {"P7", [&] { return check_unsmoothed_norm(run.summary("distributions")); }},
        {"P8", [&] { return check_noise(run.summary("noise_check")); }},
        {"P9",
         [&] { return check_collapse(run.summary("decoherence_collapse"), run.summary("classical_decay")); }},
        {"P10", [&] { return check_smoothing_scaling(run.summary("distributions")); }},
        {"P11",
         [&] {
             ScalingCalibration cal;
             cal.jz_prefactor = run.summary("chaotic_means")["fits"]["max_prefactor_two_thirds"].get<double>();
             cal.norm_prefactor =
                 run.summary("decoherence_collapse")["fits"]["max_prefactor_one_sixth"].get<double>();
             cal.source = "chaotic_means and decoherence_collapse bundles";
             return check_hyperion(hyperion_report(BodyParams{}, DustParams{}, cal));
         }},
        {"P12", [&] { return check_determinism(run.root); }},
    };

    int failed = 0;
    for (const auto& [id, eval] : criteria) {
        if (!want(id)) {
            continue;
        }
        CriterionResult r;
        try {
            r = eval();
        } catch (const std::exception& e) {
            r = {id, {{"error", 0.0, "none", false}}, e.what()};
        }
        failed += r.pass() ? 0 : 1;
        std::cout << r.line() << std::endl;
    }
    std::cout << (failed ? std::to_string(failed) + " criteria failed" : "all criteria passed") << std::endl;
    return failed ? 1 : 0;
}
