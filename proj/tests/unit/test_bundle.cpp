#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "hyperion/bundle.hpp"
#include "hyperion/errors.hpp"
#include "hyperion/io.hpp"

using namespace hyperion;
namespace fs = std::filesystem;

namespace {

fs::path fresh(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / "hyperion-unit" / name;
    fs::remove_all(d);
    fs::create_directories(d.parent_path());
    return d;
}

json small_comparison() {
    return {{"experiment", "comparison"},
            {"name", "small"},
            {"system", {{"dtau", 0.01}}},
            {"classical", {{"ensemble_size", 300}}},
            {"betas", {0.25, 0.5}},
            {"record", {{"tau_end", 0.6}, {"every", 0.1}}},
            {"distributions_at", {0.6}},
            {"smoothing", {0.5}},
            {"snapshots", {{"format", "binary"}, {"at", {0.3}}, {"members", 50}}}};
}

json small_decoherence() {
    return {{"experiment", "decoherence"},
            {"name", "small-noise"},
            {"system", {{"dtau", 0.005}}},
            {"quantum", {{"dtau", 2e-3}}},
            {"classical", {{"ensemble_size", 200}}},
            {"realizations", 5},
            {"record", {{"tau_end", 0.4}, {"every", 0.1}}},
            {"points", {{{"beta", 0.25}, {"tau_c", 0.01}, {"noise", {{"sigma_over_vch", 0.012}}}}}}};
}

std::map<std::string, std::string> hashes(const fs::path& dir) {
    std::map<std::string, std::string> h;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (e.path().filename() != "timing.json") {
            h[e.path().filename().string()] = sha256_file(e.path());
        }
    }
    return h;
}

}  // namespace

TEST_CASE("bundle contains manifest, data and summary, and is reused") {
    const ExperimentConfig c = parse_experiment(small_comparison());
    const fs::path dir = fresh("bundle");
    const BundleResult r = run_bundle(c, dir, 1);
    CHECK_FALSE(r.reused);
    for (const char* f : {"manifest.json", "summary.json", "timing.json", "trace_b0.csv", "trace_b1.csv",
                          "dist_b0_t0.csv", "snapshots_b0.bin"}) {
        CHECK(fs::exists(dir / f));
    }
    CHECK_FALSE(fs::exists(fs::path(dir.string() + ".partial")));
    const json summary = verify_bundle(dir);
    CHECK(summary["items"].size() == 2);
    const CsvTable trace = read_csv(dir / "trace_b0.csv");
    CHECK(trace.rows.size() == 6);
    CHECK(trace.meta.at("beta") == "0.25");
    CHECK(run_bundle(c, dir, 1).reused);
}

TEST_CASE("outputs are identical for any thread count") {
    for (const json& cfg : {small_comparison(), small_decoherence()}) {
        const ExperimentConfig c = parse_experiment(cfg);
        const fs::path a = fresh("threads-a");
        const fs::path b = fresh("threads-b");
        run_bundle(c, a, 1);
        run_bundle(c, b, 4);
        auto ha = hashes(a);
        auto hb = hashes(b);
        // the manifest records the directory name, which differs here
        ha.erase("manifest.json");
        hb.erase("manifest.json");
        CHECK(ha == hb);
    }
}

TEST_CASE("tampered data is detected") {
    const ExperimentConfig c = parse_experiment(small_comparison());
    const fs::path dir = fresh("tamper");
    run_bundle(c, dir, 1);
    std::ofstream(dir / "trace_b1.csv", std::ios::app) << "0,0,0,0,0,0,0\n";
    CHECK_THROWS_AS(verify_bundle(dir), IntegrityError);
    // and a damaged bundle is not silently reused or overwritten
    CHECK_THROWS_AS(run_bundle(c, dir, 1), ConfigError);
}

TEST_CASE("a different manifest cannot write into an existing bundle") {
    const fs::path dir = fresh("overlap");
    run_bundle(parse_experiment(small_comparison()), dir, 1);
    json other = small_comparison();
    other["seed"] = 2;
    CHECK_THROWS_AS(run_bundle(parse_experiment(other), dir, 1), ConfigError);
}

TEST_CASE("failed runs leave nothing behind") {
    json cfg = small_comparison();
    cfg["initial"]["j0"] = 40.0;  // outside the basis for beta = 0.25
    cfg["quantum"]["cutoff"] = 60;
    const ExperimentConfig c = parse_experiment(cfg);
    const fs::path dir = fresh("failed");
    CHECK_THROWS(run_bundle(c, dir, 1));
    CHECK_FALSE(fs::exists(dir));
    CHECK_FALSE(fs::exists(fs::path(dir.string() + ".partial")));
}

TEST_CASE("sweeps") {
    const fs::path root = fresh("sweep");
    SUBCASE("single point equals run") {
        json cfg = small_comparison();
        const SweepResult s = run_sweep(cfg, {parse_axis("initial.j0=10")}, root, 1);
        REQUIRE(s.points.size() == 1);
        set_path(cfg, "initial.j0", 10);
        const ExperimentConfig c = parse_experiment(cfg);
        const fs::path single = fresh("single");
        run_bundle(c, single, 1);
        auto ha = hashes(single);
        auto hb = hashes(s.points[0].dir);
        ha.erase("manifest.json");
        hb.erase("manifest.json");
        CHECK(ha == hb);
        CHECK(s.points[0].summary["manifest_hash"] == manifest_hash(c.normalized));
    }
    SUBCASE("cartesian product with resume") {
        const std::vector<SweepAxis> axes = {parse_axis("betas=0.25,0.5"), parse_axis("initial.j0=9,10")};
        const SweepResult s = run_sweep(small_comparison(), axes, root, 1);
        CHECK(s.points.size() == 4);
        const CsvTable t = read_csv(root / "sweep.csv");
        CHECK(t.rows.size() == 4);
        CHECK(t.values("betas") == std::vector<double>{0.25, 0.25, 0.5, 0.5});
        CHECK(t.values("initial.j0") == std::vector<double>{9, 10, 9, 10});
        const SweepResult again = run_sweep(small_comparison(), axes, root, 1);
        for (const auto& p : again.points) {
            CHECK(p.reused);
        }
        CHECK(s.points[0].summary["manifest_hash"] != s.points[1].summary["manifest_hash"]);
    }
    SUBCASE("duplicate points are rejected") {
        CHECK_THROWS_AS(run_sweep(small_comparison(), {parse_axis("betas=0.25,0.25")}, root, 1), ConfigError);
    }
    CHECK_THROWS_AS(parse_axis("betas"), ConfigError);
}
