#include "hyperion/presets.hpp"

#include <cmath>

#include "hyperion/errors.hpp"

namespace hyperion {

namespace {

const json chaotic_initial = {{"j0", 10.0}, {"sigma_j", 0.5}, {"phi0", 0.0}};
const json chaotic_system = {{"alpha", 0.5}, {"e", 0.1}};

json system_with(double dtau, double e = 0.1) { return {{"alpha", 0.5}, {"e", e}, {"dtau", dtau}}; }

json decoherence_points() {
    json pts = json::array();
    auto point = [&](json axes, double beta, double sigma_over_vch, double tau_c) {
        pts.push_back({{"axes", std::move(axes)},
                       {"beta", beta},
                       {"tau_c", tau_c},
                       {"noise", {{"sigma_over_vch", sigma_over_vch}}}});
    };
    point({"beta", "sigma", "tau_c"}, 0.05, 0.012, 0.01);
    for (double b : {0.1, 0.025, 0.0125}) {
        point({"beta"}, b, 0.012, 0.01);
    }
    for (double s : {0.006, 0.024, 0.048}) {
        point({"sigma"}, 0.05, s, 0.01);
    }
    for (double t : {0.005, 0.02, 0.04, 0.08}) {
        point({"tau_c"}, 0.05, 0.012, t);
    }
    return pts;
}

json make(std::string_view name) {
    if (name == "regular_means") {
        return {{"experiment", "comparison"},
                {"name", "regular_means"},
                {"seed", 1},
                {"system", system_with(1e-3, 0.0)},
                {"initial", {{"j0", 4.0}, {"sigma_j", std::sqrt(0.5)}, {"phi0", 0.0}}},
                {"classical", {{"sampling", "gauss_hermite"}, {"quadrature_j", 300}, {"quadrature_phi", 120}}},
                {"betas", {0.5, 0.05, 0.0125}},
                {"record", {{"tau_end", 10.0}, {"every", 0.02}}},
                {"analysis", {{"early_window", {0.0, 6.0}}, {"growth_window", {0.0, 0.0}}}}};
    }
    if (name == "chaotic_early") {
        return {{"experiment", "comparison"},
                {"name", "chaotic_early"},
                {"seed", 1},
                {"system", system_with(1e-3)},
                {"initial", chaotic_initial},
                {"classical", {{"sampling", "gauss_hermite"}, {"quadrature_j", 300}, {"quadrature_phi", 120}}},
                {"betas", {0.05, 0.025, 0.0125}},
                {"record", {{"tau_end", 2.2}, {"every", 0.01}}},
                {"analysis", {{"early_window", {0.0, 2.2}}, {"growth_window", {0.0, 0.0}}}}};
    }
    if (name == "chaotic_growth") {
        // small beta keep the growth window ahead of saturation
        return {{"experiment", "comparison"},
                {"name", "chaotic_growth"},
                {"seed", 1},
                {"system", system_with(2e-3)},
                {"initial", chaotic_initial},
                {"classical", {{"sampling", "gauss_hermite"}, {"quadrature_j", 600}, {"quadrature_phi", 240}}},
                {"betas", {0.008, 0.003, 0.001}},
                {"record", {{"tau_end", 6.0}, {"every", 0.05}}},
                {"analysis", {{"growth_window", {2.0, 5.5}}, {"envelope_bin", 0.5}}}};
    }
    if (name == "chaotic_means") {
        return {{"experiment", "comparison"},
                {"name", "chaotic_means"},
                {"seed", 1},
                {"system", system_with(0.01)},
                {"initial", chaotic_initial},
                {"classical", {{"sampling", "monte_carlo"}, {"ensemble_size", 100000}}},
                {"betas", {0.2, 0.1, 0.05, 0.025, 0.0125}},
                {"record", {{"tau_end", 100.0}, {"every", 0.1}}},
                {"analysis",
                 {{"growth_window", {2.0, 5.5}},
                  {"envelope_bin", 0.5},
                  {"stop_before", {3.0, 6.0}},
                  {"stop_after", {6.0, 12.0}},
                  {"saturation_window", {20.0, 100.0}},
                  {"maximum_window", {6.0, 100.0}}}}};
    }
    if (name == "distributions") {
        return {{"experiment", "comparison"},
                {"name", "distributions"},
                {"seed", 1},
                {"system", system_with(0.01)},
                {"initial", chaotic_initial},
                {"classical", {{"sampling", "monte_carlo"}, {"ensemble_size", 1000000}}},
                {"betas", {0.05, 0.025, 0.0125, 0.005, 0.002}},
                {"record", {{"tau_end", 40.0}, {"every", 0.5}}},
                {"distributions_at", {20.0, 40.0}},
                {"smoothing", {0.1, 0.25, 0.5, 1.0}},
                {"analysis", {{"growth_window", {0.0, 0.0}}, {"saturation_window", {20.0, 40.0}}}}};
    }
    if (name == "decoherence_collapse") {
        return {{"experiment", "decoherence"},
                {"name", "decoherence_collapse"},
                {"seed", 1},
                {"system", system_with(0.005)},
                {"initial", chaotic_initial},
                {"quantum", {{"dtau", 2e-3}}},
                {"classical", {{"sampling", "monte_carlo"}, {"ensemble_size", 10000}}},
                {"noise", {{"c", 0.5}}},
                {"realizations", 100},
                {"record", {{"tau_end", 25.0}, {"every", 0.25}}},
                {"analysis", {{"plateau_tau_c", 0.04}}},
                {"points", decoherence_points()}};
    }
    if (name == "classical_decay") {
        return {{"experiment", "classical_decay"},
                {"name", "classical_decay"},
                {"seed", 1},
                {"system", system_with(0.005)},
                {"initial", chaotic_initial},
                {"initial_b", {{"j0", 11.0}, {"sigma_j", 0.5}, {"phi0", 0.0}}},
                {"classical", {{"ensemble_size", 1000000}}},
                {"betas", {0.05}},
                {"noise", {{"sigma_over_vch", 0.012}, {"tau_c", 0.01}, {"c", 0.5}}},
                {"record", {{"tau_end", 30.0}, {"every", 0.25}}}};
    }
    if (name == "poincare") {
        json starts = json::array();
        for (double j : {2.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0, 11.0, 12.0, 13.0, 14.0}) {
            starts.push_back({{"j0", j}, {"phi0", 0.0}});
        }
        return {{"experiment", "poincare"},
                {"name", "poincare"},
                {"seed", 1},
                {"system", system_with(1e-3)},
                {"starts", starts},
                {"periods", 300}};
    }
    if (name == "lyapunov") {
        return {{"experiment", "lyapunov"},
                {"name", "lyapunov"},
                {"seed", 1},
                {"system", system_with(1e-3)},
                {"initial", chaotic_initial},
                {"tau_total", 400.0}};
    }
    if (name == "noise_check") {
        return {{"experiment", "noise_check"},
                {"name", "noise_check"},
                {"seed", 1},
                {"system", chaotic_system},
                {"noise", {{"sigma_over_vch", 0.012}, {"tau_c", 0.01}, {"c", 0.5}}},
                {"samples", 1000000},
                {"max_lag", 8},
                {"walks", 20000},
                {"walk_tau", 2.0}};
    }
    if (name == "unitarity") {
        return {{"experiment", "unitarity"},
                {"name", "unitarity"},
                {"seed", 1},
                {"system", chaotic_system},
                {"initial", chaotic_initial},
                {"quantum", {{"dtau", 1e-3}, {"method", "split_operator"}}},
                {"betas", {0.05}},
                {"record", {{"tau_end", 100.0}, {"every", 1.0}}},
                {"even_only", true}};
    }
    if (name == "first_integral") {
        return {{"experiment", "first_integral"},
                {"name", "first_integral"},
                {"seed", 1},
                {"system", system_with(1e-3, 0.0)},
                {"initial", {{"j0", 4.0}, {"sigma_j", std::sqrt(0.5)}, {"phi0", 0.0}}},
                {"classical", {{"ensemble_size", 10000}}},
                {"record", {{"tau_end", 100.0}, {"every", 1.0}}}};
    }
    throw ConfigError("preset: unknown name '" + std::string(name) + "'");
}

}  // namespace

std::vector<std::string> preset_names() {
    return {"regular_means", "chaotic_early",  "chaotic_growth", "chaotic_means", "distributions",
            "decoherence_collapse", "classical_decay", "poincare", "lyapunov",
            "noise_check",   "unitarity",      "first_integral"};
}

json preset_config(std::string_view name) { return make(name); }

}  // namespace hyperion
