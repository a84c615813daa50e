#include "hyperion/acceptance.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace hyperion {

namespace {

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", x);
    return buf;
}

Check within(std::string label, double value, double target, double tol) {
    return {std::move(label), value, num(target) + "+-" + num(tol), std::abs(value - target) <= tol};
}

Check below(std::string label, double value, double limit) {
    return {std::move(label), value, "<" + num(limit), value < limit};
}

Check at_most(std::string label, double value, double limit) {
    return {std::move(label), value, "<=" + num(limit), value <= limit};
}

Check above(std::string label, double value, double limit) {
    return {std::move(label), value, ">" + num(limit), value > limit};
}

Check at_least(std::string label, double value, double limit) {
    return {std::move(label), value, ">=" + num(limit), value >= limit};
}

Check missing(std::string label) {
    return {std::move(label), std::nan(""), "present", false};
}

/// Value at a JSON pointer, or NaN when absent or not a number.
double get(const json& j, const std::string& pointer) {
    const json::json_pointer p(pointer);
    return j.contains(p) && j[p].is_number() ? j[p].get<double>() : std::nan("");
}

const json* item_with_beta(const json& summary, double beta) {
    if (!summary.contains("items")) {
        return nullptr;
    }
    for (const auto& it : summary["items"]) {
        if (std::abs(it.value("beta", 0.0) - beta) <= 1e-12 * beta) {
            return &it;
        }
    }
    return nullptr;
}

void early_slope(CriterionResult& r, const json& s, const std::string& tag) {
    r.checks.push_back(within(tag + " slope", get(s, "/fits/early_peak/exponent"), threshold::early_slope,
                              threshold::early_slope_tol));
    double worst = 0.0;
    if (s.contains("items")) {
        for (const auto& it : s["items"]) {
            worst = std::max(worst, get(it, "/early_peak/max_error") / get(it, "/early_peak/value"));
        }
    }
    r.checks.push_back(below(tag + " error/diff", worst, threshold::error_fraction));
}

}  // namespace

bool CriterionResult::pass() const {
    if (checks.empty()) {
        return false;
    }
    for (const auto& c : checks) {
        if (!c.pass) {
            return false;
        }
    }
    return true;
}

std::string CriterionResult::line() const {
    std::ostringstream out;
    out << id << ' ' << (pass() ? "PASS" : "FAIL");
    const char* sep = " ";
    for (const auto& c : checks) {
        out << sep << c.label << '=' << num(c.value) << " (" << c.target << (c.pass ? "" : ", failed") << ')';
        sep = "; ";
    }
    if (!note.empty()) {
        out << " | " << note;
    }
    return out.str();
}

CriterionResult check_unitarity(const json& s) {
    CriterionResult r{"P1", {}, ""};
    r.checks.push_back(below("norm drift", get(s, "/max_norm_drift"), threshold::norm_drift));
    r.checks.push_back(at_most("odd-m probability", get(s, "/max_odd_probability"), 0.0));
    return r;
}

CriterionResult check_first_integral(const json& s) {
    CriterionResult r{"P2", {}, ""};
    r.checks.push_back(below("energy drift", get(s, "/max_relative_drift"), threshold::energy_drift));
    return r;
}

CriterionResult check_lyapunov(const json& s) {
    CriterionResult r{"P3", {}, ""};
    r.checks.push_back(within("lambda", get(s, "/lambda"), threshold::lyapunov, threshold::lyapunov_tol));
    r.note = "std error " + num(get(s, "/std_error"));
    return r;
}

CriterionResult check_early_scaling(const json& regular, const json& chaotic) {
    CriterionResult r{"P4", {}, ""};
    early_slope(r, regular, "regular");
    early_slope(r, chaotic, "chaotic");
    return r;
}

CriterionResult check_growth_saturation(const json& growth, const json& means, std::optional<double> lambda) {
    CriterionResult r{"P5", {}, ""};
    std::ostringstream note;
    const char* sep = "";
    if (!growth.is_null()) {
        note << "growth rate (error fraction) by beta:";
        sep = "; ";
        if (const json* it = item_with_beta(growth, threshold::growth_beta)) {
            const double rate = get(*it, "/growth/rate");
            r.checks.push_back(within("growth rate", rate, threshold::growth_rate, threshold::growth_rate_tol));
            r.checks.push_back(below("classical error/envelope", get(*it, "/growth/error_fraction"),
                                     threshold::growth_error_fraction));
            if (lambda) {
                r.checks.push_back(above("rate/lambda", rate / *lambda, 2.0));
            }
        } else {
            r.checks.push_back(missing("growth item"));
        }
        for (const auto& i : growth["items"]) {
            note << ' ' << num(i.value("beta", 0.0)) << ':' << num(get(i, "/growth/rate")) << " ("
                 << num(get(i, "/growth/error_fraction")) << ')';
        }
    }
    if (!means.is_null()) {
        if (const json* it = item_with_beta(means, 0.05)) {
            r.checks.push_back(
                at_most("peak[6,12]/peak[3,6]", get(*it, "/growth_stop/ratio"), threshold::growth_stop_ratio));
            r.checks.push_back(within("classical <Jz> sat", get(*it, "/saturation/cl_mean"),
                                      threshold::saturation_jz, threshold::saturation_jz_tol));
        } else {
            r.checks.push_back(missing("beta=0.05 item"));
        }
        note << sep << "saturating runs:";
        for (const auto& i : means["items"]) {
            note << ' ' << num(i.value("beta", 0.0)) << ':' << num(get(i, "/growth/rate"));
        }
    }
    r.note = note.str();
    return r;
}

CriterionResult check_saturation_scaling(const json& s) {
    CriterionResult r{"P6", {}, ""};
    const double n = s.contains("items") ? static_cast<double>(s["items"].size()) : 0.0;
    r.checks.push_back(at_least("betas", n, threshold::saturation_min_betas));
    r.checks.push_back(within("mean exponent", get(s, "/fits/saturation_mean/exponent"),
                              threshold::saturation_slope, threshold::saturation_slope_tol));
    r.checks.push_back(within("max exponent", get(s, "/fits/max_abs_diff/exponent"),
                              threshold::saturation_slope, threshold::saturation_slope_tol));
    return r;
}

CriterionResult check_unsmoothed_norm(const json& s) {
    CriterionResult r{"P7", {}, ""};
    double lowest = std::numeric_limits<double>::infinity();
    double floor = 0.0;
    // reduction at the smallest beta; larger beta reduce less, as the smoothing law predicts
    double smallest_beta = std::numeric_limits<double>::infinity();
    double reduction = std::nan("");
    std::ostringstream by_beta;
    by_beta << "reduction by beta:";
    for (const auto& it : s.value("items", json::array())) {
        const double beta = it.value("beta", 0.0);
        for (const auto& n : it.value("one_norm", json::array())) {
            if (std::abs(n.value("tau", 0.0) - 40.0) > 1e-9) {
                continue;
            }
            const double raw = n.value("value", 0.0);
            lowest = std::min(lowest, raw);
            floor = std::max(floor, n.value("statistical_floor", 0.0));
            for (const auto& sm : n.value("smoothed", json::array())) {
                if (std::abs(sm.value("delta_s", 0.0) - threshold::smoothing_delta) < 1e-12) {
                    const double f = raw / sm.value("value", 1.0);
                    by_beta << ' ' << num(beta) << ':' << num(f);
                    if (beta < smallest_beta) {
                        smallest_beta = beta;
                        reduction = f;
                    }
                }
            }
        }
    }
    if (std::isnan(reduction)) {
        r.checks.push_back(missing("tau=40 distributions"));
        return r;
    }
    r.checks.push_back(above("min |qm-cl|_1 at tau=40", lowest, threshold::unsmoothed_norm));
    r.checks.push_back(at_least("reduction at ds=0.25, beta=" + num(smallest_beta), reduction,
                                threshold::smoothing_reduction));
    r.note = by_beta.str() + "; largest classical sampling floor " + num(floor);
    return r;
}

CriterionResult check_noise(const json& s) {
    CriterionResult r{"P8", {}, ""};
    r.checks.push_back(at_most("max |z| autocov", get(s, "/max_abs_z"), threshold::autocov_z));
    r.checks.push_back(within("D_hat/D", get(s, "/diffusion/ratio"), 1.0, threshold::diffusion_rel));
    return r;
}

CriterionResult check_collapse(const json& s, const json& classical) {
    CriterionResult r{"P9", {}, ""};
    const double n = s.contains("items") ? static_cast<double>(s["items"].size()) : 0.0;
    r.checks.push_back(at_least("points", n, threshold::collapse_min_points));
    r.checks.push_back(within("collapse exponent", get(s, "/fits/collapse/exponent"), threshold::collapse_slope,
                              threshold::collapse_slope_tol));
    r.checks.push_back(within("tau_d plateau", get(s, "/fits/tau_d_plateau/value"), threshold::decay_time,
                              threshold::decay_time_tol));
    if (!classical.is_null()) {
        r.checks.push_back(within("classical tau_d", get(classical, "/decay/tau_d"), threshold::decay_time,
                                  threshold::decay_time_tol));
    }
    std::ostringstream note;
    note << "per-axis exponents:";
    for (const char* a : {"beta", "sigma", "tau_c"}) {
        note << ' ' << a << ':' << num(get(s, std::string("/fits/collapse_by_axis/") + a + "/exponent"));
    }
    r.note = note.str();
    return r;
}

CriterionResult check_smoothing_scaling(const json& s) {
    CriterionResult r{"P10", {}, ""};
    const json* fit = nullptr;
    if (s.contains("/fits/smoothing"_json_pointer)) {
        for (const auto& e : s["fits"]["smoothing"]) {
            if (std::abs(e.value("tau", 0.0) - 20.0) < 1e-9) {
                fit = &e;
            }
        }
    }
    if (!fit) {
        r.checks.push_back(missing("tau=20 smoothing fit"));
        return r;
    }
    r.checks.push_back(within("exponent", get(*fit, "/fit/exponent"), threshold::smoothing_slope,
                              threshold::smoothing_slope_tol));
    r.checks.push_back(within("prefactor", get(*fit, "/fit/prefactor"), threshold::smoothing_prefactor,
                              threshold::smoothing_prefactor_tol));
    r.note = "points " + num(get(*fit, "/points"));
    return r;
}

CriterionResult check_hyperion(const json& h) {
    CriterionResult r{"P11", {}, ""};
    auto v = [&](const char* key) { return get(h, std::string("/") + key + "/value"); };
    auto rel = [](double x, double ref) { return x / ref - 1.0; };
    r.checks.push_back(within("alpha", v("alpha"), 0.43, 0.01));
    r.checks.push_back(within("I3 rel", rel(v("i3"), 2.1e29), 0.0, 0.05));
    r.checks.push_back(within("beta rel", rel(v("beta"), 9.0e-58), 0.0, 0.05));
    r.checks.push_back(within("eta rel", rel(v("eta"), 1.8e-6), 0.0, 0.10));
    r.checks.push_back(within("log2 D/6.4e-50", std::log2(v("D") / 6.4e-50), 0.0, 1.0));
    r.checks.push_back(within("log10 dJz/5e-37", std::log10(v("max_jz_difference") / 5e-37), 0.0, 1.0));
    r.checks.push_back(within("log10 norm/1e-10", std::log10(v("max_one_norm") / 1e-10), 0.0, 1.0));
    r.note = "calibration " + h.value("/calibration/source"_json_pointer, std::string("?"));
    return r;
}

std::vector<CriterionResult> bundle_criteria(const std::string& preset, const json& s) {
    if (preset == "unitarity") return {check_unitarity(s)};
    if (preset == "first_integral") return {check_first_integral(s)};
    if (preset == "lyapunov") return {check_lyapunov(s)};
    if (preset == "chaotic_growth") return {check_growth_saturation(s, json(), std::nullopt)};
    if (preset == "chaotic_means") return {check_growth_saturation(json(), s, std::nullopt), check_saturation_scaling(s)};
    if (preset == "distributions") return {check_unsmoothed_norm(s), check_smoothing_scaling(s)};
    if (preset == "noise_check") return {check_noise(s)};
    if (preset == "decoherence_collapse") return {check_collapse(s, json())};
    if (preset == "regular_means" || preset == "chaotic_early") {
        CriterionResult r{"P4", {}, "one regime only"};
        early_slope(r, s, preset == "regular_means" ? "regular" : "chaotic");
        return {r};
    }
    return {};
}

}  // namespace hyperion
