#include "hyperion/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "hyperion/analysis.hpp"
#include "hyperion/classical.hpp"
#include "hyperion/errors.hpp"
#include "hyperion/io.hpp"
#include "hyperion/orbit.hpp"
#include "hyperion/realization.hpp"
#include "hyperion/rng.hpp"

namespace hyperion {

namespace fs = std::filesystem;

namespace {

constexpr ExperimentKind all_kinds[] = {
    ExperimentKind::comparison,  ExperimentKind::decoherence, ExperimentKind::classical_decay,
    ExperimentKind::poincare,    ExperimentKind::lyapunov,    ExperimentKind::noise_check,
    ExperimentKind::unitarity,   ExperimentKind::first_integral};

template <typename Fn>
void checked(const std::string& path, Fn&& fn) {
    try {
        fn();
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

InitialStateSpec read_initial(ConfigReader& r, const std::string& key, InitialStateSpec def) {
    InitialStateSpec s;
    s.j0 = r.number(key + ".j0", def.j0);
    s.sigma_j = r.number(key + ".sigma_j", def.sigma_j);
    s.phi0 = r.number(key + ".phi0", def.phi0);
    checked(key, [&] { s.validate(); });
    return s;
}

/// sigma given directly or as a fraction of the characteristic potential.
double read_sigma(ConfigReader& r, const std::string& key, double alpha) {
    const bool rel = r.has(key + ".sigma_over_vch");
    const bool abs = r.has(key + ".sigma");
    require_field(!(rel && abs), key, "give sigma or sigma_over_vch, not both");
    if (rel) {
        return r.number(key + ".sigma_over_vch") * characteristic_potential(alpha);
    }
    return r.number(key + ".sigma", 0.0);
}

NoiseParams read_noise(ConfigReader& r, const std::string& key, double alpha) {
    NoiseParams np;
    np.sigma = read_sigma(r, key, alpha);
    np.tau_c = r.number(key + ".tau_c", 0.01);
    np.c = r.number(key + ".c", 0.5);
    np.harmonic = static_cast<int>(r.integer(key + ".harmonic", 1));
    checked(key, [&] { np.validate(); });
    return np;
}

void read_record(ConfigReader& r, ExperimentConfig& c) {
    c.tau_end = r.number("record.tau_end");
    c.every = r.number("record.every", 0.1);
    require_field(c.tau_end > 0.0, "record.tau_end", "must be > 0");
    require_field(c.every > 0.0 && c.every <= c.tau_end, "record.every", "must lie in (0, tau_end]");
    require_field(c.tau_end / c.every <= 1e6, "record.every", "more than 10^6 record times");
}

void read_quantum(ConfigReader& r, ExperimentConfig& c) {
    c.quantum.dtau = r.number("quantum.dtau", 1e-3);
    c.quantum.method = parse_quantum_method(
        r.text("quantum.method", "split_operator", {"split_operator", "crank_nicolson", "rk4_monitor"}));
    c.quantum.norm_tol = r.number("quantum.norm_tol", 1e-9);
    c.quantum.edge_tol = r.number("quantum.edge_tol", 1e-10);
    c.cutoff = static_cast<int>(r.integer("quantum.cutoff", 0));
    checked("quantum", [&] { c.quantum.validate(); });
}

void read_classical(ConfigReader& r, ExperimentConfig& c) {
    c.sampling =
        parse_classical_sampling(r.text("classical.sampling", "monte_carlo", {"monte_carlo", "gauss_hermite"}));
    c.ensemble_size = r.integer("classical.ensemble_size", 100000);
    c.quadrature_j = r.integer("classical.quadrature_j", 300);
    c.quadrature_phi = r.integer("classical.quadrature_phi", 120);
    require_field(c.ensemble_size >= 1, "classical.ensemble_size", "must be >= 1");
    require_field(c.quadrature_j >= 3 && c.quadrature_phi >= 3, "classical", "quadrature orders must be >= 3");
}

void read_betas(ConfigReader& r, ExperimentConfig& c, std::size_t min_count) {
    c.betas = r.numbers("betas");
    require_field(c.betas.size() >= min_count, "betas",
                  "needs at least " + std::to_string(min_count) + " value(s)");
    for (std::size_t i = 0; i < c.betas.size(); ++i) {
        SystemParams p = c.system;
        p.beta = c.betas[i];
        checked("betas[" + std::to_string(i) + "]", [&] { p.validate(); });
    }
}

void read_times(ConfigReader& r, const std::string& key, std::vector<double>& out, double tau_end) {
    out = r.numbers(key, std::vector<double>{});
    std::sort(out.begin(), out.end());
    for (double t : out) {
        require_field(t > 0.0 && t <= tau_end, key, "times must lie in (0, record.tau_end]");
    }
}

void read_windows(ConfigReader& r, AnalysisWindows& w) {
    auto pair = [&](const std::string& key, double& lo, double& hi) {
        const auto v = r.numbers("analysis." + key, std::vector<double>{lo, hi});
        require_field(v.size() == 2 && v[0] <= v[1], "analysis." + key, "expected [lo, hi] with lo <= hi");
        lo = v[0];
        hi = v[1];
    };
    pair("early_window", w.early_lo, w.early_hi);
    pair("growth_window", w.growth_lo, w.growth_hi);
    pair("stop_before", w.stop_before_lo, w.stop_before_hi);
    pair("stop_after", w.stop_after_lo, w.stop_after_hi);
    pair("saturation_window", w.saturation_lo, w.saturation_hi);
    pair("maximum_window", w.maximum_lo, w.maximum_hi);
    w.envelope_bin = r.number("analysis.envelope_bin", w.envelope_bin);
    require_field(w.envelope_bin > 0.0, "analysis.envelope_bin", "must be > 0");
}

json fit_json(const ScalingFit& f) {
    return {{"exponent", f.exponent},
            {"prefactor", f.prefactor},
            {"r_squared", f.r_squared},
            {"exponent_std_error", f.exponent_std_error},
            {"residuals", f.residuals}};
}

json decay_json(const DecayFit& f) {
    return {{"tau_d", f.tau_d},         {"amplitude", f.amplitude},
            {"floor", f.floor},         {"tau_start", f.tau_start},
            {"rms_residual", f.rms_residual}, {"decaying", f.decaying}};
}

/// Power-law fit or null when fewer than three positive points exist.
json try_fit(const std::vector<double>& x, const std::vector<double>& y) {
    try {
        return fit_json(fit_power_law(x, y));
    } catch (const AnalysisError& e) {
        return json{{"error", e.what()}};
    }
}

std::string join(const std::vector<double>& v) {
    std::string s;
    for (double x : v) {
        s += (s.empty() ? "" : ";") + format_double(x);
    }
    return s;
}

std::string indexed(std::string_view stem, std::size_t i, std::string_view ext) {
    return std::string(stem) + std::to_string(i) + std::string(ext);
}

bool in_run(double lo, double hi, double tau_end) { return hi > lo && hi <= tau_end + 1e-12; }

// ---------------------------------------------------------------- comparison

json comparison_item(const ExperimentConfig& cfg, std::size_t index, const OrbitSolution& orbit,
                     const fs::path& dir, unsigned threads) {
    const double beta = cfg.betas[index];
    ComparisonSpec spec;
    spec.params = cfg.system;
    spec.params.beta = beta;
    spec.initial = cfg.initial;
    spec.quantum = cfg.quantum;
    spec.cutoff = cfg.cutoff;
    spec.sampling = cfg.sampling;
    spec.ensemble_size = cfg.ensemble_size;
    spec.quadrature_j = cfg.quadrature_j;
    spec.quadrature_phi = cfg.quadrature_phi;
    spec.seed = cfg.seed;  // common random numbers across beta
    spec.record_at = cfg.record_times();
    spec.keep_distributions_at = cfg.distributions_at;
    spec.threads = threads;

    std::vector<ClassicalEnsemble> snaps;
    const bool want_snaps = cfg.snapshot_format != "none" && !cfg.snapshot_at.empty();
    EnsembleObserver grab;
    if (want_snaps) {
        grab = [&](double t, const ClassicalEnsemble& e) {
            if (!std::binary_search(cfg.snapshot_at.begin(), cfg.snapshot_at.end(), t)) {
                return;
            }
            const std::size_t k = cfg.snapshot_members ? std::min(cfg.snapshot_members, e.size()) : e.size();
            ClassicalEnsemble s;
            s.tau = t;
            s.seed = e.seed;
            s.phi.assign(e.phi.begin(), e.phi.begin() + static_cast<long>(k));
            s.jz.assign(e.jz.begin(), e.jz.begin() + static_cast<long>(k));
            snaps.push_back(std::move(s));
        };
    }
    const ComparisonTrace tr = run_comparison(spec, orbit, nullptr, grab);
    const auto diff = tr.difference();
    const std::size_t members = cfg.sampling == ClassicalSampling::monte_carlo
                                    ? cfg.ensemble_size
                                    : cfg.quadrature_j * cfg.quadrature_phi;

    {
        CsvWriter w(dir / indexed("trace_b", index, ".csv"), "comparison_trace",
                    {"tau", "qm_jz", "cl_jz", "diff", "cl_std", "cl_error", "one_norm"},
                    {{"beta", format_double(beta)},
                     {"K", std::to_string(tr.cutoff)},
                     {"sampling", std::string(to_string(cfg.sampling))},
                     {"members", std::to_string(members)}});
        for (std::size_t i = 0; i < tr.tau.size(); ++i) {
            w.row({tr.tau[i], tr.qm_jz[i], tr.cl_jz[i], diff[i], tr.cl_std[i], tr.cl_error[i],
                   tr.one_norm[i]});
        }
        w.close();
    }

    json item = {{"beta", beta}, {"cutoff", tr.cutoff}, {"members", members}};
    const auto& W = cfg.windows;
    if (in_run(W.early_lo, W.early_hi, cfg.tau_end)) {
        const Peak p = peak_abs(tr.tau, diff, W.early_lo, W.early_hi);
        double err = 0.0;
        for (std::size_t i = 0; i < tr.tau.size(); ++i) {
            if (tr.tau[i] >= W.early_lo && tr.tau[i] <= W.early_hi) {
                err = std::max(err, tr.cl_error[i]);
            }
        }
        item["early_peak"] = {{"value", p.value}, {"tau", p.tau}, {"max_error", err},
                              {"window", {W.early_lo, W.early_hi}}};
    }
    if (in_run(W.growth_lo, W.growth_hi, cfg.tau_end)) {
        const Envelope env = envelope(tr.tau, diff, W.envelope_bin);
        try {
            const ExponentialFit g = fit_exponential(env.tau, env.value, W.growth_lo, W.growth_hi);
            // classical error against the envelope, bin by bin
            const Envelope err = envelope(tr.tau, tr.cl_error, W.envelope_bin);
            double worst = 0.0;
            for (std::size_t k = 0; k < env.tau.size(); ++k) {
                if (env.tau[k] >= W.growth_lo && env.tau[k] <= W.growth_hi) {
                    worst = std::max(worst, err.value[k] / env.value[k]);
                }
            }
            item["growth"] = {{"rate", g.rate}, {"r_squared", g.r_squared}, {"points", g.points},
                              {"error_fraction", worst}, {"window", {W.growth_lo, W.growth_hi}},
                              {"envelope_bin", W.envelope_bin}};
        } catch (const AnalysisError& e) {
            item["growth"] = {{"error", e.what()}};
        }
    }
    if (in_run(W.stop_after_lo, W.stop_after_hi, cfg.tau_end) && W.stop_before_hi > W.stop_before_lo) {
        const double before = peak_abs(tr.tau, diff, W.stop_before_lo, W.stop_before_hi).value;
        const double after = peak_abs(tr.tau, diff, W.stop_after_lo, W.stop_after_hi).value;
        item["growth_stop"] = {{"before", before}, {"after", after},
                               {"ratio", before > 0.0 ? after / before : 0.0},
                               {"before_window", {W.stop_before_lo, W.stop_before_hi}},
                               {"after_window", {W.stop_after_lo, W.stop_after_hi}}};
    }
    if (cfg.tau_end > W.saturation_lo) {
        const double hi = std::min(W.saturation_hi, cfg.tau_end);
        std::vector<double> ad(diff.size());
        std::transform(diff.begin(), diff.end(), ad.begin(), [](double d) { return std::abs(d); });
        item["saturation"] = {{"mean_abs_diff", time_average(tr.tau, ad, W.saturation_lo, hi)},
                              {"cl_mean", time_average(tr.tau, tr.cl_jz, W.saturation_lo, hi)},
                              {"qm_mean", time_average(tr.tau, tr.qm_jz, W.saturation_lo, hi)},
                              {"max_error", *std::max_element(tr.cl_error.begin(), tr.cl_error.end())},
                              {"window", {W.saturation_lo, hi}}};
    }
    if (cfg.tau_end >= W.maximum_lo) {
        const double hi = std::min(W.maximum_hi, cfg.tau_end);
        const Peak mx = peak_abs(tr.tau, diff, W.maximum_lo, hi);
        item["max_abs_diff"] = {{"value", mx.value}, {"tau", mx.tau}, {"window", {W.maximum_lo, hi}}};
    }

    json norms = json::array();
    for (std::size_t j = 0; j < tr.distributions.size(); ++j) {
        const auto& d = tr.distributions[j];
        std::vector<double> used;
        std::vector<std::vector<double>> sq, sc;
        json smoothed = json::array();
        for (double ds : cfg.smoothing) {
            if (ds < beta) {
                continue;
            }
            used.push_back(ds);
            sq.push_back(triangular_smooth(d.p_qm, beta, ds));
            sc.push_back(triangular_smooth(d.p_cl, beta, ds));
            smoothed.push_back({{"delta_s", ds}, {"value", one_norm(sc.back(), sq.back())}});
        }
        std::vector<std::string> cols = {"m", "jz", "p_qm", "p_cl"};
        for (std::size_t k = 0; k < used.size(); ++k) {
            cols.push_back("qm_s" + std::to_string(k));
            cols.push_back("cl_s" + std::to_string(k));
        }
        CsvWriter w(dir / ("dist_b" + std::to_string(index) + "_t" + std::to_string(j) + ".csv"),
                    "distribution", cols,
                    {{"beta", format_double(beta)},
                     {"tau", format_double(d.tau)},
                     {"smoothing", used.empty() ? "none" : join(used)}});
        std::vector<double> row(cols.size());
        for (std::size_t m = 0; m < d.p_qm.size(); ++m) {
            const double mm = static_cast<double>(m) - tr.cutoff;
            row[0] = mm;
            row[1] = beta * mm;
            row[2] = d.p_qm[m];
            row[3] = d.p_cl[m];
            for (std::size_t k = 0; k < used.size(); ++k) {
                row[4 + 2 * k] = sq[k][m];
                row[5 + 2 * k] = sc[k][m];
            }
            w.row(row);
        }
        w.close();
        const double floor = cfg.sampling == ClassicalSampling::monte_carlo
                                 ? one_norm_floor(d.p_cl, static_cast<double>(cfg.ensemble_size))
                                 : 0.0;
        norms.push_back({{"tau", d.tau},
                         {"value", one_norm(d.p_cl, d.p_qm)},
                         {"statistical_floor", floor},
                         {"smoothed", smoothed}});
    }
    item["one_norm"] = norms;

    if (want_snaps) {
        if (cfg.snapshot_format == "csv") {
            write_classical_snapshots_csv(dir / indexed("snapshots_b", index, ".csv"), snaps);
        } else {
            write_classical_snapshots_binary(dir / indexed("snapshots_b", index, ".bin"), snaps);
        }
    }
    return item;
}

json run_comparison_experiment(const ExperimentConfig& cfg, const fs::path& dir, unsigned threads) {
    const OrbitSolution orbit = build_orbit_table({cfg.system.e, cfg.orbit_samples});
    json items = json::array();
    for (std::size_t i = 0; i < cfg.betas.size(); ++i) {
        items.push_back(comparison_item(cfg, i, orbit, dir, threads));
    }

    json summary = {{"items", items}};
    json fits = json::object();
    json metrics = json::object();
    auto series = [&](const char* key, const char* field) {
        std::vector<double> x, y;
        for (const auto& it : items) {
            if (it.contains(key)) {
                x.push_back(it["beta"].get<double>());
                y.push_back(it[key][field].get<double>());
            }
        }
        return std::pair{x, y};
    };
    for (const auto& [name, key, field] :
         {std::tuple{"early_peak", "early_peak", "value"},
          std::tuple{"saturation_mean", "saturation", "mean_abs_diff"},
          std::tuple{"max_abs_diff", "max_abs_diff", "value"}}) {
        const auto [x, y] = series(key, field);
        if (x.size() >= 3) {
            fits[name] = try_fit(x, y);
        }
    }
    {
        // prefactor of the fixed-exponent law max = C beta^(2/3), geometric mean
        const auto [x, y] = series("max_abs_diff", "value");
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            s += std::log(y[i] / std::pow(x[i], 2.0 / 3.0));
        }
        if (!x.empty()) {
            fits["max_prefactor_two_thirds"] = std::exp(s / static_cast<double>(x.size()));
        }
    }
    if (!cfg.smoothing.empty()) {
        json sm = json::array();
        for (std::size_t j = 0; j < cfg.distributions_at.size(); ++j) {
            std::vector<double> b, ds, v;
            for (const auto& it : items) {
                for (const auto& s : it["one_norm"][j]["smoothed"]) {
                    b.push_back(it["beta"].get<double>());
                    ds.push_back(s["delta_s"].get<double>());
                    v.push_back(s["value"].get<double>());
                }
            }
            json entry = {{"tau", cfg.distributions_at[j]}, {"points", v.size()}};
            try {
                entry["fit"] = fit_json(smoothing_scaling_check(b, ds, v));
            } catch (const AnalysisError& e) {
                entry["fit"] = {{"error", e.what()}};
            }
            sm.push_back(entry);
        }
        fits["smoothing"] = sm;
    }
    for (std::size_t i = 0; i < items.size(); ++i) {
        const std::string p = "b" + std::to_string(i) + ".";
        const auto& it = items[i];
        metrics[p + "beta"] = it["beta"];
        if (it.contains("max_abs_diff")) metrics[p + "max_abs_diff"] = it["max_abs_diff"]["value"];
        if (it.contains("early_peak")) metrics[p + "early_peak"] = it["early_peak"]["value"];
        if (it.contains("growth") && it["growth"].contains("rate")) metrics[p + "growth_rate"] = it["growth"]["rate"];
        if (it.contains("saturation")) metrics[p + "saturation_mean"] = it["saturation"]["mean_abs_diff"];
        for (std::size_t j = 0; j < it["one_norm"].size(); ++j) {
            metrics[p + "one_norm_t" + std::to_string(j)] = it["one_norm"][j]["value"];
        }
    }
    for (auto it = fits.begin(); it != fits.end(); ++it) {
        if (it->is_object() && it->contains("exponent")) {
            metrics["fit." + it.key() + ".exponent"] = (*it)["exponent"];
        }
    }
    summary["fits"] = fits;
    summary["metrics"] = metrics;
    return summary;
}

// --------------------------------------------------------------- decoherence

json run_decoherence_experiment(const ExperimentConfig& cfg, const fs::path& dir, unsigned threads) {
    const OrbitSolution orbit = build_orbit_table({cfg.system.e, cfg.orbit_samples});
    const auto record = cfg.record_times();
    json items = json::array();
    json metrics = json::object();
    std::vector<double> xi_all, max_all;
    std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> by_axis;
    std::vector<std::pair<double, DecayFit>> tau_c_axis;

    for (std::size_t p = 0; p < cfg.points.size(); ++p) {
        const DecoherencePoint& pt = cfg.points[p];
        NoiseParams np = *cfg.noise;
        np.sigma = pt.sigma;
        np.tau_c = pt.tau_c;
        np.seed = derive_seed(cfg.seed, seed_domain::sweep_point, p);

        ComparisonSpec spec;
        spec.params = cfg.system;
        spec.params.beta = pt.beta;
        spec.params.dtau = std::min(cfg.system.dtau, np.update_interval());
        spec.initial = cfg.initial;
        spec.quantum = cfg.quantum;
        spec.cutoff = cfg.cutoff;
        spec.sampling = cfg.sampling;
        spec.ensemble_size = cfg.ensemble_size;
        spec.quadrature_j = cfg.quadrature_j;
        spec.quadrature_phi = cfg.quadrature_phi;
        spec.record_at = record;

        const RealizationAverage av = run_realization_average(spec, np, cfg.realizations, orbit, threads);
        const double d = diffusion_parameter(np);
        const double xi = collapse_parameter(pt.beta, d);

        {
            CsvWriter w(dir / indexed("point_", p, ".csv"), "decoherence_average",
                        {"tau", "qm_jz", "cl_jz", "diff", "one_norm"},
                        {{"beta", format_double(pt.beta)},
                         {"sigma", format_double(np.sigma)},
                         {"tau_c", format_double(np.tau_c)},
                         {"D", format_double(d)},
                         {"xi", format_double(xi)},
                         {"realizations", std::to_string(cfg.realizations)}});
            for (std::size_t i = 0; i < av.tau.size(); ++i) {
                w.row({av.tau[i], av.qm_jz[i], av.cl_jz[i], av.qm_jz[i] - av.cl_jz[i], av.one_norm[i]});
            }
            w.close();
        }
        {
            CsvWriter w(dir / indexed("realizations_", p, ".csv"), "realization_traces",
                        {"realization", "tau", "qm_jz", "cl_jz"});
            for (std::size_t r = 0; r < av.qm_jz_trace.size(); ++r) {
                for (std::size_t i = 0; i < av.tau.size(); ++i) {
                    w.row({static_cast<double>(r), av.tau[i], av.qm_jz_trace[r][i], av.cl_jz_trace[r][i]});
                }
            }
            w.close();
        }
        for (std::size_t r = 0; r < std::min(cfg.export_noise, cfg.realizations); ++r) {
            NoiseParams nr = np;
            nr.seed = av.seeds[r].noise;
            write_noise_csv(dir / ("noise_p" + std::to_string(p) + "_r" + std::to_string(r) + ".csv"),
                            make_noise_realization(nr, record.back(), spec.params.dtau));
        }

        const Peak mx = peak_abs(av.tau, av.one_norm, 0.0, record.back());
        const DecayFit decay = fit_decay_time(av.tau, av.one_norm);
        const double floor = cfg.sampling == ClassicalSampling::monte_carlo
                                 ? one_norm_floor(av.p_cl.back(), static_cast<double>(cfg.ensemble_size) *
                                                                      static_cast<double>(cfg.realizations))
                                 : 0.0;
        json seeds = json::array();
        for (const auto& s : av.seeds) {
            seeds.push_back({{"noise", s.noise}, {"ensemble", s.ensemble}});
        }
        json item = {{"axes", pt.axes},
                     {"beta", pt.beta},
                     {"sigma", np.sigma},
                     {"sigma_over_vch", np.sigma / characteristic_potential(cfg.system.alpha)},
                     {"tau_c", np.tau_c},
                     {"D", d},
                     {"xi", xi},
                     {"classical_dtau", spec.params.dtau},
                     {"noise_seed", np.seed},
                     {"max_one_norm", {{"value", mx.value}, {"tau", mx.tau}}},
                     {"decay", decay_json(decay)},
                     {"classical_floor", floor},
                     {"seeds", seeds}};
        items.push_back(item);
        xi_all.push_back(xi);
        max_all.push_back(mx.value);
        for (const auto& a : pt.axes) {
            by_axis[a].first.push_back(xi);
            by_axis[a].second.push_back(mx.value);
            if (a == "tau_c") {
                tau_c_axis.emplace_back(pt.tau_c, decay);
            }
        }
        const std::string key = "p" + std::to_string(p) + ".";
        metrics[key + "xi"] = xi;
        metrics[key + "max_one_norm"] = mx.value;
        metrics[key + "tau_d"] = decay.tau_d;
    }

    json fits = json::object();
    if (xi_all.size() >= 3) {
        fits["collapse"] = try_fit(xi_all, max_all);
        if (fits["collapse"].contains("exponent")) {
            metrics["fit.collapse.exponent"] = fits["collapse"]["exponent"];
        }
    }
    if (!xi_all.empty()) {
        // prefactor of the fixed-exponent law max = C xi^(1/6), geometric mean
        double s = 0.0;
        for (std::size_t i = 0; i < xi_all.size(); ++i) {
            s += std::log(max_all[i] / std::pow(xi_all[i], 1.0 / 6.0));
        }
        fits["max_prefactor_one_sixth"] = std::exp(s / static_cast<double>(xi_all.size()));
    }
    json per_axis = json::object();
    for (const auto& [axis, xy] : by_axis) {
        if (xy.first.size() >= 3) {
            per_axis[axis] = try_fit(xy.first, xy.second);
        }
    }
    fits["collapse_by_axis"] = per_axis;
    std::sort(tau_c_axis.begin(), tau_c_axis.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    json dvt = json::array();
    double plateau = 0.0;
    int plateau_n = 0;
    for (const auto& [tc, f] : tau_c_axis) {
        dvt.push_back({{"tau_c", tc}, {"tau_d", f.tau_d}, {"decaying", f.decaying}});
        if (tc >= cfg.windows.plateau_tau_c - 1e-15 && f.decaying) {
            plateau += f.tau_d;
            ++plateau_n;
        }
    }
    fits["decay_vs_tau_c"] = dvt;
    if (plateau_n > 0) {
        fits["tau_d_plateau"] = {{"value", plateau / plateau_n}, {"points", plateau_n},
                                 {"min_tau_c", cfg.windows.plateau_tau_c}};
        metrics["tau_d_plateau"] = plateau / plateau_n;
    }
    return {{"items", items}, {"fits", fits}, {"metrics", metrics}};
}

// ----------------------------------------------------------- classical decay

json run_classical_decay_experiment(const ExperimentConfig& cfg, const fs::path& dir, unsigned threads) {
    const OrbitSolution orbit = build_orbit_table({cfg.system.e, cfg.orbit_samples});
    SystemParams params = cfg.system;
    params.beta = cfg.betas.front();
    const auto record = cfg.record_times();
    std::optional<NoiseRealization> noise;
    if (cfg.noise && cfg.noise->sigma > 0.0) {
        NoiseParams np = *cfg.noise;
        np.seed = derive_seed(cfg.seed, seed_domain::noise, 0);
        params.dtau = std::min(params.dtau, np.update_interval());
        noise.emplace(make_noise_realization(np, record.back(), params.dtau));
    }
    const int K = default_cutoff(params.beta);
    std::vector<std::vector<double>> ha, hb;
    std::vector<double> ma, mb;
    auto run = [&](const InitialStateSpec& s, std::uint64_t seed, auto& hist, auto& mean) {
        ClassicalEnsemble e = sample_initial_ensemble(s, params, cfg.ensemble_size, seed);
        evolve_ensemble(e, params, orbit, record.back(), noise ? &*noise : nullptr, record,
                        [&](double, const ClassicalEnsemble& x) {
                            hist.push_back(histogram_jz(x, params.beta, K));
                            mean.push_back(ensemble_mean_jz(x));
                        },
                        EnsembleOptions{threads});
    };
    run(cfg.initial, derive_seed(cfg.seed, seed_domain::sweep_point, 0), ha, ma);
    run(cfg.initial_b, derive_seed(cfg.seed, seed_domain::sweep_point, 1), hb, mb);

    std::vector<double> y(record.size());
    CsvWriter w(dir / "decay.csv", "classical_decay", {"tau", "one_norm", "mean_a", "mean_b"},
                {{"beta", format_double(params.beta)}, {"members", std::to_string(cfg.ensemble_size)}});
    for (std::size_t i = 0; i < record.size(); ++i) {
        y[i] = one_norm(ha[i], hb[i]);
        w.row({record[i], y[i], ma[i], mb[i]});
    }
    w.close();
    const DecayFit f = fit_decay_time(record, y);
    const Peak mx = peak_abs(record, y, 0.0, record.back());
    const double floor =
        std::sqrt(2.0) * one_norm_floor(ha.back(), static_cast<double>(cfg.ensemble_size));
    return {{"decay", decay_json(f)},
            {"max_one_norm", {{"value", mx.value}, {"tau", mx.tau}}},
            {"statistical_floor", floor},
            {"classical_dtau", params.dtau},
            {"metrics", {{"tau_d", f.tau_d}, {"floor", f.floor}}}};
}

// ---------------------------------------------------------- poincare, lyapunov

json run_poincare_experiment(const ExperimentConfig& cfg, const fs::path& dir) {
    const OrbitSolution orbit = build_orbit_table({cfg.system.e, cfg.orbit_samples});
    const auto pts = poincare_section(cfg.starts, cfg.system, orbit, cfg.periods);
    CsvWriter w(dir / "poincare.csv", "poincare", {"trajectory", "period", "phi", "jz"},
                {{"alpha", format_double(cfg.system.alpha)}, {"e", format_double(cfg.system.e)}});
    for (const auto& p : pts) {
        w.row({static_cast<double>(p.trajectory), static_cast<double>(p.period), p.phi, p.jz});
    }
    w.close();
    return {{"points", pts.size()}, {"metrics", {{"points", pts.size()}}}};
}

json run_lyapunov_experiment(const ExperimentConfig& cfg) {
    const OrbitSolution orbit = build_orbit_table({cfg.system.e, cfg.orbit_samples});
    const LyapunovEstimate l = lyapunov_exponent(cfg.initial, cfg.system, orbit, cfg.tau_total);
    return {{"lambda", l.lambda},
            {"std_error", l.std_error},
            {"resolved", l.resolved},
            {"metrics", {{"lambda", l.lambda}, {"std_error", l.std_error}}}};
}

// --------------------------------------------------------------- noise check

json run_noise_check_experiment(const ExperimentConfig& cfg, const fs::path& dir) {
    const NoiseParams& np = *cfg.noise;
    const auto seq = correlated_sequence(np.c, cfg.samples, derive_seed(cfg.seed, seed_domain::noise, 0));
    const auto acov = autocovariance(seq, cfg.max_lag);
    const double v = stationary_variance(np.c);
    const double n = static_cast<double>(seq.size());
    // Bartlett variance of a lag-k autocovariance for a Gaussian AR(1) process
    const long span = static_cast<long>(std::ceil(60.0 / std::abs(std::log(np.c)))) +
                      static_cast<long>(cfg.max_lag);
    auto gamma = [&](long j) { return v * std::pow(np.c, std::abs(static_cast<double>(j))); };

    json rows = json::array();
    std::vector<double> lags, pos;
    double worst_z = 0.0;
    CsvWriter w(dir / "autocovariance.csv", "autocovariance",
                {"lag", "empirical", "expected", "std_error", "z"},
                {{"c", format_double(np.c)}, {"samples", std::to_string(cfg.samples)}});
    for (std::size_t k = 0; k < acov.size(); ++k) {
        const long kk = static_cast<long>(k);
        double s = 0.0;
        for (long j = -span; j <= span; ++j) {
            s += gamma(j) * gamma(j) + gamma(j + kk) * gamma(j - kk);
        }
        const double se = std::sqrt(s / n);
        const double expected = gamma(kk);
        const double z = (acov[k] - expected) / se;
        worst_z = std::max(worst_z, std::abs(z));
        w.row({static_cast<double>(k), acov[k], expected, se, z});
        rows.push_back({{"lag", k}, {"empirical", acov[k]}, {"expected", expected}, {"std_error", se}, {"z", z}});
        if (acov[k] > 0.0) {
            lags.push_back(static_cast<double>(k));
            pos.push_back(acov[k]);
        }
    }
    w.close();
    double mean = 0.0;
    for (double x : seq) {
        mean += x;
    }
    mean /= n;
    // the long-run variance of the mean of an AR(1) sequence is gamma_0 (1 + c) / (1 - c)
    const double mean_se = std::sqrt(v * (1.0 + np.c) / (1.0 - np.c) / n);
    const ExponentialFit slope = fit_exponential(lags, pos, 0.0, static_cast<double>(cfg.max_lag));
    const double tau_c_hat = -np.update_interval() / slope.rate;

    const DiffusionEstimate de =
        empirical_diffusion(np, cfg.walks, cfg.walk_tau, derive_seed(cfg.seed, seed_domain::diffusion_walk, 0));
    const double d = diffusion_parameter(np);
    return {{"autocovariance", rows},
            {"max_abs_z", worst_z},
            {"mean", {{"value", mean}, {"std_error", mean_se}}},
            {"variance", {{"empirical", acov[0]}, {"expected", v}}},
            {"log_slope", {{"value", slope.rate}, {"expected", std::log(np.c)},
                           {"relative_error", std::abs(slope.rate / std::log(np.c) - 1.0)}}},
            {"tau_c", {{"fitted", tau_c_hat}, {"configured", np.tau_c}}},
            {"diffusion", {{"d_hat", de.d_hat}, {"std_error", de.std_error}, {"sufficient", de.sufficient},
                           {"d_formula", d}, {"ratio", d > 0.0 ? de.d_hat / d : 0.0}}},
            {"metrics", {{"max_abs_z", worst_z}, {"d_ratio", d > 0.0 ? de.d_hat / d : 0.0}}}};
}

// ------------------------------------------------------- unitarity, energy

json run_unitarity_experiment(const ExperimentConfig& cfg, const fs::path& dir) {
    const OrbitSolution orbit = build_orbit_table({cfg.system.e, cfg.orbit_samples});
    SystemParams params = cfg.system;
    params.beta = cfg.betas.front();
    const int K = cfg.cutoff > 0 ? cfg.cutoff : default_cutoff(params.beta);
    QuantumState psi = init_quantum_state(cfg.initial, params, K);
    if (cfg.even_only) {
        for (int m = -K; m <= K; ++m) {
            if (m % 2 != 0) {
                psi.at(m) = 0.0;
            }
        }
        const double s = 1.0 / std::sqrt(psi.norm_squared());
        for (auto& a : psi.c) {
            a *= s;
        }
    }
    const auto record = cfg.record_times();
    double worst_norm = 0.0;
    double worst_odd = 0.0;
    CsvWriter w(dir / "unitarity.csv", "unitarity", {"tau", "norm_drift", "odd_probability", "qm_jz"},
                {{"beta", format_double(params.beta)}, {"K", std::to_string(K)},
                 {"method", std::string(to_string(cfg.quantum.method))}});
    evolve_quantum(psi, params, orbit, record.back(), cfg.quantum, nullptr, record,
                   [&](double t, const QuantumState& s) {
                       const double drift = std::abs(s.norm_squared() - 1.0);
                       double odd = 0.0;
                       for (int m = -K; m <= K; ++m) {
                           if (m % 2 != 0) {
                               odd += std::norm(s.at(m));
                           }
                       }
                       worst_norm = std::max(worst_norm, drift);
                       worst_odd = std::max(worst_odd, odd);
                       w.row({t, drift, odd, expectation_jz(s)});
                   });
    w.close();
    return {{"beta", params.beta},
            {"cutoff", K},
            {"even_only", cfg.even_only},
            {"max_norm_drift", worst_norm},
            {"max_odd_probability", worst_odd},
            {"metrics", {{"max_norm_drift", worst_norm}, {"max_odd_probability", worst_odd}}}};
}

json run_first_integral_experiment(const ExperimentConfig& cfg, const fs::path& dir, unsigned threads) {
    const OrbitSolution orbit = build_orbit_table({cfg.system.e, cfg.orbit_samples});
    ClassicalEnsemble e = sample_initial_ensemble(cfg.initial, cfg.system, cfg.ensemble_size,
                                                  derive_seed(cfg.seed, seed_domain::trajectory, 0));
    const double alpha = cfg.system.alpha;
    // drift is relative to |E0|, floored at the potential depth for orbits near E = 0
    const double scale = 3.0 * std::numbers::pi * std::numbers::pi * alpha;
    std::vector<double> e0(e.size());
    for (std::size_t i = 0; i < e.size(); ++i) {
        e0[i] = rotating_frame_energy(e.phi[i], e.jz[i], 0.0, alpha);
    }
    double worst = 0.0;
    CsvWriter w(dir / "energy.csv", "first_integral", {"tau", "max_relative_drift"},
                {{"members", std::to_string(e.size())}, {"dtau", format_double(cfg.system.dtau)}});
    evolve_ensemble(e, cfg.system, orbit, cfg.tau_end, nullptr, cfg.record_times(),
                    [&](double t, const ClassicalEnsemble& x) {
                        double d = 0.0;
                        for (std::size_t i = 0; i < x.size(); ++i) {
                            const double en = rotating_frame_energy(x.phi[i], x.jz[i], t, alpha);
                            d = std::max(d, std::abs(en - e0[i]) / std::max(std::abs(e0[i]), scale));
                        }
                        worst = std::max(worst, d);
                        w.row({t, d});
                    },
                    EnsembleOptions{threads});
    w.close();
    return {{"max_relative_drift", worst},
            {"energy_scale_floor", scale},
            {"metrics", {{"max_relative_drift", worst}}}};
}

}  // namespace

std::string_view to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::comparison: return "comparison";
        case ExperimentKind::decoherence: return "decoherence";
        case ExperimentKind::classical_decay: return "classical_decay";
        case ExperimentKind::poincare: return "poincare";
        case ExperimentKind::lyapunov: return "lyapunov";
        case ExperimentKind::noise_check: return "noise_check";
        case ExperimentKind::unitarity: return "unitarity";
        case ExperimentKind::first_integral: return "first_integral";
    }
    return "comparison";
}

ExperimentKind parse_experiment_kind(std::string_view name) {
    for (auto k : all_kinds) {
        if (to_string(k) == name) {
            return k;
        }
    }
    throw ConfigError("experiment: unknown kind '" + std::string(name) + "'");
}

std::vector<double> ExperimentConfig::record_times() const {
    std::vector<double> t;
    const auto n = static_cast<std::size_t>(std::floor(tau_end / every + 1e-9));
    for (std::size_t i = 1; i <= n; ++i) {
        t.push_back(static_cast<double>(i) * every);
    }
    // explicit times replace grid points within 1e-9 so lookups match exactly
    std::vector<double> exact = distributions_at;
    exact.insert(exact.end(), snapshot_at.begin(), snapshot_at.end());
    exact.push_back(tau_end);
    for (double x : exact) {
        auto it = std::lower_bound(t.begin(), t.end(), x - 1e-9);
        if (it != t.end() && std::abs(*it - x) <= 1e-9) {
            *it = x;
        } else {
            t.insert(it, x);
        }
    }
    return t;
}

ExperimentConfig parse_experiment(const json& input) {
    ConfigReader r(input);
    ExperimentConfig c;
    std::vector<std::string> kinds;
    for (auto k : all_kinds) {
        kinds.emplace_back(to_string(k));
    }
    c.kind = parse_experiment_kind(r.text("experiment", std::nullopt, kinds));
    c.name = r.text("name", std::string(to_string(c.kind)));
    require_field(!c.name.empty() && c.name.find_first_of("/ \\") == std::string::npos, "name",
                  "must be non-empty without spaces or slashes");
    c.seed = r.integer("seed", 1);

    c.system.alpha = r.number("system.alpha", 0.5);
    c.system.e = r.number("system.e", 0.1);
    c.system.dtau = r.number("system.dtau", 1e-4);
    c.system.beta = 0.05;
    checked("system", [&] { c.system.validate(); });
    c.orbit_samples = r.integer("system.orbit_samples", 4096);
    checked("system", [&] { OrbitParams{c.system.e, c.orbit_samples}.validate(); });

    switch (c.kind) {
        case ExperimentKind::comparison: {
            c.initial = read_initial(r, "initial", {});
            read_quantum(r, c);
            read_classical(r, c);
            read_betas(r, c, 1);
            read_record(r, c);
            read_times(r, "distributions_at", c.distributions_at, c.tau_end);
            c.smoothing = r.numbers("smoothing", std::vector<double>{});
            for (double s : c.smoothing) {
                require_field(s > 0.0, "smoothing", "half-widths must be > 0");
            }
            read_windows(r, c.windows);
            c.snapshot_format = r.text("snapshots.format", "none", {"none", "csv", "binary"});
            read_times(r, "snapshots.at", c.snapshot_at, c.tau_end);
            c.snapshot_members = r.integer("snapshots.members", 0);
            break;
        }
        case ExperimentKind::decoherence: {
            c.initial = read_initial(r, "initial", {});
            read_quantum(r, c);
            read_classical(r, c);
            read_record(r, c);
            NoiseParams base;
            base.c = r.number("noise.c", 0.5);
            base.harmonic = static_cast<int>(r.integer("noise.harmonic", 1));
            checked("noise", [&] { base.validate(); });
            c.noise = base;
            c.realizations = r.integer("realizations", 100);
            require_field(c.realizations >= 1, "realizations", "must be >= 1");
            c.export_noise = r.integer("export_noise", 0);
            c.windows.plateau_tau_c = r.number("analysis.plateau_tau_c", c.windows.plateau_tau_c);
            const json pts = r.array("points");
            require_field(!pts.empty(), "points", "needs at least one point");
            json normalized = json::array();
            for (std::size_t i = 0; i < pts.size(); ++i) {
                const std::string path = "points[" + std::to_string(i) + "]";
                ConfigReader pr(pts[i]);
                DecoherencePoint pt;
                pt.beta = pr.number("beta");
                pt.tau_c = pr.number("tau_c");
                pt.sigma = read_sigma(pr, "noise", c.system.alpha);
                const json axes = pr.array("axes", json::array());
                for (const auto& a : axes) {
                    require_field(a.is_string(), path + ".axes", "expected strings");
                    pt.axes.push_back(a.get<std::string>());
                }
                pr.put("axes", axes);
                try {
                    pr.reject_unknown();
                } catch (const ConfigError& e) {
                    throw ConfigError(path + "." + e.what());
                }
                NoiseParams np = base;
                np.sigma = pt.sigma;
                np.tau_c = pt.tau_c;
                SystemParams sp = c.system;
                sp.beta = pt.beta;
                checked(path, [&] {
                    np.validate();
                    sp.validate();
                });
                require_field(np.update_interval() >= c.quantum.dtau, path,
                              "noise update interval is shorter than quantum.dtau");
                c.points.push_back(pt);
                normalized.push_back(pr.normalized());
            }
            r.put("points", normalized);
            break;
        }
        case ExperimentKind::classical_decay: {
            c.initial = read_initial(r, "initial", {});
            c.initial_b = read_initial(r, "initial_b", {11.0, 0.5, 0.0});
            read_classical(r, c);
            read_betas(r, c, 1);
            require_field(c.betas.size() == 1, "betas", "classical_decay takes one bin width");
            read_record(r, c);
            if (r.has("noise")) {
                c.noise = read_noise(r, "noise", c.system.alpha);
            }
            break;
        }
        case ExperimentKind::poincare: {
            const json starts = r.array("starts");
            require_field(!starts.empty(), "starts", "needs at least one start point");
            json normalized = json::array();
            for (std::size_t i = 0; i < starts.size(); ++i) {
                ConfigReader sr(starts[i]);
                InitialStateSpec s;
                s.j0 = sr.number("j0");
                s.phi0 = sr.number("phi0", 0.0);
                try {
                    sr.reject_unknown();
                } catch (const ConfigError& e) {
                    throw ConfigError("starts[" + std::to_string(i) + "]." + e.what());
                }
                c.starts.push_back(s);
                normalized.push_back(sr.normalized());
            }
            r.put("starts", normalized);
            c.periods = static_cast<int>(r.integer("periods", 200));
            require_field(c.periods >= 1, "periods", "must be >= 1");
            break;
        }
        case ExperimentKind::lyapunov: {
            c.initial = read_initial(r, "initial", {});
            c.tau_total = r.number("tau_total", 400.0);
            require_field(c.tau_total >= 200.0, "tau_total", "must be >= 200 for convergence");
            break;
        }
        case ExperimentKind::noise_check: {
            c.noise = read_noise(r, "noise", c.system.alpha);
            c.samples = r.integer("samples", 1000000);
            c.max_lag = r.integer("max_lag", 8);
            c.walks = r.integer("walks", 20000);
            c.walk_tau = r.number("walk_tau", 2.0);
            require_field(c.samples > c.max_lag + 1, "samples", "must exceed max_lag + 1");
            require_field(c.walks >= 2, "walks", "must be >= 2");
            require_field(c.walk_tau > c.noise->tau_c, "walk_tau", "must exceed noise.tau_c");
            break;
        }
        case ExperimentKind::unitarity: {
            c.initial = read_initial(r, "initial", {});
            read_quantum(r, c);
            read_betas(r, c, 1);
            require_field(c.betas.size() == 1, "betas", "unitarity takes one beta");
            read_record(r, c);
            c.even_only = r.boolean("even_only", true);
            break;
        }
        case ExperimentKind::first_integral: {
            require_field(c.system.e == 0.0, "system.e", "the energy is conserved only on a circular orbit");
            c.initial = read_initial(r, "initial", {4.0, std::sqrt(0.5), 0.0});
            c.ensemble_size = r.integer("classical.ensemble_size", 10000);
            require_field(c.ensemble_size >= 1, "classical.ensemble_size", "must be >= 1");
            read_record(r, c);
            break;
        }
    }
    r.reject_unknown();
    c.normalized = r.normalized();
    return c;
}

json run_experiment(const ExperimentConfig& config, const fs::path& dir, unsigned threads) {
    threads = std::max(1U, threads);
    switch (config.kind) {
        case ExperimentKind::comparison: return run_comparison_experiment(config, dir, threads);
        case ExperimentKind::decoherence: return run_decoherence_experiment(config, dir, threads);
        case ExperimentKind::classical_decay: return run_classical_decay_experiment(config, dir, threads);
        case ExperimentKind::poincare: return run_poincare_experiment(config, dir);
        case ExperimentKind::lyapunov: return run_lyapunov_experiment(config);
        case ExperimentKind::noise_check: return run_noise_check_experiment(config, dir);
        case ExperimentKind::unitarity: return run_unitarity_experiment(config, dir);
        case ExperimentKind::first_integral: return run_first_integral_experiment(config, dir, threads);
    }
    throw ConfigError("experiment: unhandled kind");
}

}  // namespace hyperion
