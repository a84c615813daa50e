#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "hyperion/errors.hpp"
#include "hyperion/experiments.hpp"
#include "hyperion/presets.hpp"

using namespace hyperion;

namespace {

std::string error_of(const json& j) {
    try {
        parse_experiment(j);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

json minimal() {
    return {{"experiment", "comparison"}, {"betas", {0.05}}, {"record", {{"tau_end", 1.0}}}};
}

}  // namespace

TEST_CASE("defaults are filled into the normalized config") {
    const ExperimentConfig c = parse_experiment(minimal());
    CHECK(c.system.alpha == 0.5);
    CHECK(c.initial.j0 == 10.0);
    CHECK(c.normalized["system"]["dtau"] == 1e-4);
    CHECK(c.normalized["quantum"]["method"] == "split_operator");
    CHECK(parse_experiment(c.normalized).normalized == c.normalized);
}

TEST_CASE("errors name the offending field") {
    json j = minimal();
    j["system"]["alpha"] = 1.5;
    CHECK(error_of(j).starts_with("system:"));
    j = minimal();
    j["sytem"] = json::object();
    CHECK(error_of(j) == "sytem: unknown field");
    j = minimal();
    j["record"]["tau_end"] = "ten";
    CHECK(error_of(j) == "record.tau_end: expected a number");
    j = minimal();
    j.erase("betas");
    CHECK(error_of(j) == "betas: required field is missing");
    j = minimal();
    j["initial"]["sigma_j"] = -1.0;
    CHECK(error_of(j).starts_with("initial:"));
    j = minimal();
    j["quantum"]["method"] = "euler";
    CHECK(error_of(j).starts_with("quantum.method:"));
    j = minimal();
    j["distributions_at"] = {5.0};
    CHECK(error_of(j).starts_with("distributions_at:"));
}

TEST_CASE("decoherence points are checked against the quantum step") {
    json j = {{"experiment", "decoherence"},
              {"quantum", {{"dtau", 2e-3}}},
              {"record", {{"tau_end", 1.0}}},
              {"points", {{{"beta", 0.05}, {"tau_c", 0.001}, {"noise", {{"sigma", 0.2}}}}}}};
    CHECK(error_of(j).starts_with("points[0]:"));
    j["points"][0]["tau_c"] = 0.01;
    j["points"][0]["colour"] = 1;
    CHECK(error_of(j) == "points[0].colour: unknown field");
}

TEST_CASE("record times include explicit times exactly") {
    json j = minimal();
    j["record"] = {{"tau_end", 1.0}, {"every", 0.1}};
    j["distributions_at"] = {0.3, 0.35};
    const auto t = parse_experiment(j).record_times();
    CHECK(t.size() == 11);
    CHECK(std::find(t.begin(), t.end(), 0.3) != t.end());
    CHECK(std::find(t.begin(), t.end(), 0.35) != t.end());
    CHECK(t.back() == 1.0);
}

TEST_CASE("every preset parses and matches its config file") {
    for (const auto& name : preset_names()) {
        CAPTURE(name);
        const json p = preset_config(name);
        const ExperimentConfig c = parse_experiment(p);
        CHECK(c.name == name);
        const auto file = std::filesystem::path(HYPERION_SOURCE_DIR) / "configs" / (name + ".json");
        REQUIRE(std::filesystem::exists(file));
        std::ifstream in(file);
        CHECK(json::parse(in) == p);
    }
    CHECK_THROWS_AS(preset_config("nope"), ConfigError);
}
