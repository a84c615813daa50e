#include "hyperion/classical.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>
#include <thread>

#include <gsl/gsl_integration.h>

#include "vector_kernels.hpp"
#include "hyperion/environment.hpp"
#include "hyperion/errors.hpp"
#include "hyperion/orbit.hpp"
#include "hyperion/rng.hpp"
#include "hyperion/schedule.hpp"

namespace hyperion {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;
constexpr double max_classical_step = 0.01;

void check_finite(const ClassicalEnsemble& ens) {
    for (std::size_t i = 0; i < ens.size(); ++i) {
        if (!std::isfinite(ens.phi[i]) || !std::isfinite(ens.jz[i])) {
            std::ostringstream msg;
            msg << "non-finite classical trajectory " << i << " at tau=" << ens.tau;
            throw NumericalError(msg.str());
        }
    }
}

// Splits [0, n) into kernel-width-aligned ranges, one per worker.
template <typename Fn>
void parallel_blocks(std::size_t n, unsigned threads, Fn&& fn) {
    constexpr std::size_t w = detail::kernel_width;
    const std::size_t blocks = (n + w - 1) / w;
    const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(threads, blocks));
    if (workers == 1) {
        fn(std::size_t{0}, n);
        return;
    }
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t k = 0; k < workers; ++k) {
        const std::size_t lo = std::min(n, (blocks * k / workers) * w);
        const std::size_t hi = std::min(n, (blocks * (k + 1) / workers) * w);
        pool.emplace_back([&fn, lo, hi] { fn(lo, hi); });
    }
}

}  // namespace

void SystemParams::validate() const {
    if (!(alpha >= 0.0 && alpha < 1.0)) {
        throw ConfigError("alpha must lie in [0, 1)");
    }
    if (!(e >= 0.0 && e < 1.0)) {
        throw ConfigError("eccentricity must satisfy 0 <= e < 1");
    }
    if (!(beta > 0.0)) {
        throw ConfigError("beta must be > 0");
    }
    if (!(dtau > 0.0)) {
        throw ConfigError("dtau must be > 0");
    }
}

void InitialStateSpec::validate() const {
    if (!(sigma_j > 0.0)) {
        throw ConfigError("sigma_j must be > 0");
    }
    if (!std::isfinite(j0) || !std::isfinite(phi0)) {
        throw ConfigError("initial state centre must be finite");
    }
}

ClassicalEnsemble sample_initial_ensemble(const InitialStateSpec& spec, const SystemParams& params,
                                          std::size_t n, std::uint64_t seed) {
    spec.validate();
    params.validate();
    if (n == 0) {
        throw ConfigError("ensemble size must be >= 1");
    }
    const double sigma_phi = spec.sigma_phi(params.beta);
    if (sigma_phi > 1.0) {
        warn("initial angle width sigma_phi=" + std::to_string(sigma_phi) +
             " exceeds 1 rad; the angular distribution is no longer narrow");
    }
    ClassicalEnsemble ens;
    ens.seed = seed;
    ens.phi.resize(n);
    ens.jz.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        CounterRng rng(derive_seed(seed, seed_domain::trajectory, i));
        ens.jz[i] = spec.j0 + spec.sigma_j * rng.normal();
        ens.phi[i] = spec.phi0 + sigma_phi * rng.normal();
    }
    return ens;
}

namespace {

// Nodes and normalized weights for the standard normal density.
void normal_quadrature(std::size_t n, std::vector<double>& x, std::vector<double>& w) {
    gsl_integration_fixed_workspace* ws =
        gsl_integration_fixed_alloc(gsl_integration_fixed_hermite, n, 0.0, 0.5, 0.0, 0.0);
    if (ws == nullptr) {
        throw NumericalError("Gauss-Hermite rule of order " + std::to_string(n) + " unavailable");
    }
    const double* nodes = gsl_integration_fixed_nodes(ws);
    const double* weights = gsl_integration_fixed_weights(ws);
    x.assign(nodes, nodes + n);
    w.assign(weights, weights + n);
    gsl_integration_fixed_free(ws);
    double total = 0.0;
    for (double v : w) {
        total += v;
    }
    for (double& v : w) {
        v /= total;
    }
}

}  // namespace

ClassicalEnsemble gauss_hermite_ensemble(const InitialStateSpec& spec, const SystemParams& params,
                                         std::size_t n_j, std::size_t n_phi) {
    spec.validate();
    params.validate();
    if (n_j == 0 || n_phi == 0) {
        throw ConfigError("Gauss-Hermite orders must be >= 1");
    }
    std::vector<double> xj, wj, xp, wp;
    normal_quadrature(n_j, xj, wj);
    normal_quadrature(n_phi, xp, wp);
    const double sigma_phi = spec.sigma_phi(params.beta);
    ClassicalEnsemble ens;
    ens.phi.reserve(n_j * n_phi);
    ens.jz.reserve(n_j * n_phi);
    ens.weight.reserve(n_j * n_phi);
    for (std::size_t a = 0; a < n_j; ++a) {
        for (std::size_t b = 0; b < n_phi; ++b) {
            ens.jz.push_back(spec.j0 + spec.sigma_j * xj[a]);
            ens.phi.push_back(spec.phi0 + sigma_phi * xp[b]);
            ens.weight.push_back(wj[a] * wp[b]);
        }
    }
    return ens;
}

void evolve_ensemble(ClassicalEnsemble& ens, const SystemParams& params, const OrbitSolution& orbit,
                     double tau_end, const NoiseRealization* noise,
                     std::span<const double> record_at, const EnsembleObserver& observer,
                     const EnsembleOptions& options) {
    params.validate();
    if (params.dtau > max_classical_step) {
        throw ConfigError("classical dtau " + std::to_string(params.dtau) +
                          " exceeds the accuracy guard 0.01");
    }
    if (!(tau_end > ens.tau)) {
        throw ConfigError("evolve_ensemble needs tau_end > current tau");
    }
    if (ens.phi.size() != ens.jz.size()) {
        throw ConfigError("ensemble arrays differ in length");
    }
    if (noise != nullptr && noise->update_interval() < params.dtau) {
        throw ConfigError("noise update interval shorter than the integrator step");
    }
    const double coef_scale = torque_scale * params.alpha;
    const int harmonic = noise != nullptr ? noise->params().harmonic : 1;
    const auto schedule = build_schedule(ens.tau, tau_end, params.dtau, record_at, noise);

    std::vector<detail::StageDrive> drives;
    for (const Segment& seg : schedule) {
        if (seg.steps > 0 && seg.t1 != seg.t0) {
            const double h = (seg.t1 - seg.t0) / seg.steps;
            drives.resize(2 * static_cast<std::size_t>(seg.steps) + 1);
            for (std::size_t k = 0; k < drives.size(); ++k) {
                const double t = seg.t0 + 0.5 * h * static_cast<double>(k);
                const auto d = orbit.drive(t);
                drives[k] = {coef_scale * d.inv_r_cubed, 2.0 * d.theta};
            }
            const double noise_amp =
                noise != nullptr ? noise->amplitude_at(0.5 * (seg.t0 + seg.t1)) : 0.0;
            parallel_blocks(ens.size(), options.threads, [&](std::size_t lo, std::size_t hi) {
                detail::rk4_advance(ens.phi.data() + lo, ens.jz.data() + lo, hi - lo, drives, h,
                                    noise_amp, harmonic);
            });
            ens.tau = seg.t1;
            check_finite(ens);
        }
        if (seg.record && observer) {
            observer(ens.tau, ens);
        }
    }
    ens.tau = tau_end;
}

std::vector<ClassicalEnsemble> evolve_ensemble(ClassicalEnsemble ens, const SystemParams& params,
                                               const OrbitSolution& orbit, double tau_end,
                                               const NoiseRealization* noise,
                                               std::span<const double> record_at,
                                               const EnsembleOptions& options) {
    std::vector<ClassicalEnsemble> out;
    evolve_ensemble(
        ens, params, orbit, tau_end, noise, record_at,
        [&out](double, const ClassicalEnsemble& e) { out.push_back(e); }, options);
    return out;
}

double ensemble_mean_jz(const ClassicalEnsemble& ens) {
    if (ens.jz.empty()) {
        throw AnalysisError("mean of an empty ensemble");
    }
    double sum = 0.0;
    if (ens.weighted()) {
        for (std::size_t i = 0; i < ens.size(); ++i) {
            sum += ens.weight[i] * ens.jz[i];
        }
        return sum;
    }
    for (double j : ens.jz) {
        sum += j;
    }
    return sum / static_cast<double>(ens.jz.size());
}

double ensemble_std_jz(const ClassicalEnsemble& ens) {
    const double mean = ensemble_mean_jz(ens);
    double ss = 0.0;
    if (ens.weighted()) {
        for (std::size_t i = 0; i < ens.size(); ++i) {
            ss += ens.weight[i] * (ens.jz[i] - mean) * (ens.jz[i] - mean);
        }
        return std::sqrt(ss);
    }
    for (double j : ens.jz) {
        ss += (j - mean) * (j - mean);
    }
    return std::sqrt(ss / static_cast<double>(ens.jz.size()));
}

namespace {

// Bin index of each sample; throws when any falls outside the basis.
template <typename Add>
void bin_samples(std::span<const double> jz, double beta, int K, Add&& add) {
    if (!(beta > 0.0) || K < 0) {
        throw ConfigError("histogram needs beta > 0 and K >= 0");
    }
    if (jz.empty()) {
        throw AnalysisError("histogram of an empty ensemble");
    }
    std::size_t outside = 0;
    for (std::size_t i = 0; i < jz.size(); ++i) {
        const double m = std::floor(jz[i] / beta + 0.5);
        if (!(m >= -K && m <= K)) {
            ++outside;
            continue;
        }
        add(static_cast<std::size_t>(static_cast<long long>(m) + K), i);
    }
    if (outside > 0) {
        throw NumericalError(std::to_string(outside) +
                             " samples fall outside |Jz| <= K*beta; increase the basis cutoff K");
    }
}

}  // namespace

std::vector<double> histogram_jz(std::span<const double> jz, double beta, int K) {
    std::vector<std::size_t> counts(2 * static_cast<std::size_t>(std::max(K, 0)) + 1, 0);
    bin_samples(jz, beta, K, [&counts](std::size_t bin, std::size_t) { ++counts[bin]; });
    std::vector<double> p(counts.size());
    const double n = static_cast<double>(jz.size());
    for (std::size_t i = 0; i < counts.size(); ++i) {
        p[i] = static_cast<double>(counts[i]) / n;
    }
    return p;
}

std::vector<double> histogram_jz(const ClassicalEnsemble& ens, double beta, int K) {
    if (!ens.weighted()) {
        return histogram_jz(std::span<const double>(ens.jz), beta, K);
    }
    if (!(beta > 0.0) || K < 0) {
        throw ConfigError("histogram needs beta > 0 and K >= 0");
    }
    // Far quadrature nodes may leave the basis; tolerate them while their
    // combined weight is negligible.
    std::vector<double> p(2 * static_cast<std::size_t>(K) + 1, 0.0);
    double lost = 0.0;
    for (std::size_t i = 0; i < ens.size(); ++i) {
        const double m = std::floor(ens.jz[i] / beta + 0.5);
        if (!(m >= -K && m <= K)) {
            lost += ens.weight[i];
            continue;
        }
        p[static_cast<std::size_t>(static_cast<long long>(m) + K)] += ens.weight[i];
    }
    if (lost > 1e-12) {
        throw NumericalError("quadrature weight " + std::to_string(lost) +
                             " falls outside |Jz| <= K*beta; increase the basis cutoff K");
    }
    return p;
}

double wrap_angle(double phi) {
    double r = std::fmod(phi, two_pi);
    if (r < 0.0) {
        r += two_pi;
    }
    return r >= two_pi ? 0.0 : r;
}

std::vector<PoincarePoint> poincare_section(std::span<const InitialStateSpec> starts,
                                            const SystemParams& params, const OrbitSolution& orbit,
                                            int n_periods) {
    if (n_periods < 1) {
        throw ConfigError("poincare_section needs n_periods >= 1");
    }
    ClassicalEnsemble ens;
    for (const auto& s : starts) {
        ens.phi.push_back(s.phi0);
        ens.jz.push_back(s.j0);
    }
    if (ens.jz.empty()) {
        return {};
    }
    std::vector<double> records(static_cast<std::size_t>(n_periods));
    for (int k = 0; k < n_periods; ++k) {
        records[static_cast<std::size_t>(k)] = k + 1.0;
    }
    std::vector<PoincarePoint> out;
    out.reserve(ens.size() * records.size());
    int period = 0;
    evolve_ensemble(ens, params, orbit, static_cast<double>(n_periods), nullptr, records,
                    [&](double, const ClassicalEnsemble& e) {
                        ++period;
                        for (std::size_t i = 0; i < e.size(); ++i) {
                            out.push_back({i, period, wrap_angle(e.phi[i]), e.jz[i]});
                        }
                    });
    return out;
}

LyapunovEstimate lyapunov_exponent(const InitialStateSpec& spec, const SystemParams& params,
                                   const OrbitSolution& orbit, double tau_total,
                                   const LyapunovOptions& options) {
    if (!(tau_total > 0.0) || !(options.renorm_interval > 0.0) || options.blocks < 2) {
        throw ConfigError("lyapunov_exponent: invalid horizon or options");
    }
    const double d0 = options.initial_separation;
    ClassicalEnsemble pair;
    pair.phi = {spec.phi0, spec.phi0 + d0};
    pair.jz = {spec.j0, spec.j0};

    const auto intervals =
        static_cast<std::size_t>(std::llround(tau_total / options.renorm_interval));
    std::vector<double> log_growth;
    log_growth.reserve(intervals);
    for (std::size_t k = 0; k < intervals; ++k) {
        const double t_next = options.renorm_interval * static_cast<double>(k + 1);
        evolve_ensemble(pair, params, orbit, t_next, nullptr, {}, EnsembleObserver{});
        const double dp = pair.phi[1] - pair.phi[0];
        const double dj = pair.jz[1] - pair.jz[0];
        const double dist = std::hypot(dp, dj);
        log_growth.push_back(std::log(dist / d0));
        pair.phi[1] = pair.phi[0] + dp * d0 / dist;
        pair.jz[1] = pair.jz[0] + dj * d0 / dist;
    }

    const double total_time = options.renorm_interval * static_cast<double>(log_growth.size());
    double sum = 0.0;
    for (double g : log_growth) {
        sum += g;
    }
    LyapunovEstimate est;
    est.lambda = sum / total_time;

    const std::size_t nb = static_cast<std::size_t>(options.blocks);
    const std::size_t per = log_growth.size() / nb;
    if (per > 0) {
        std::vector<double> block_rates(nb, 0.0);
        for (std::size_t b = 0; b < nb; ++b) {
            for (std::size_t k = b * per; k < (b + 1) * per; ++k) {
                block_rates[b] += log_growth[k];
            }
            block_rates[b] /= options.renorm_interval * static_cast<double>(per);
        }
        double mean = 0.0;
        for (double r : block_rates) {
            mean += r;
        }
        mean /= static_cast<double>(nb);
        double ss = 0.0;
        for (double r : block_rates) {
            ss += (r - mean) * (r - mean);
        }
        est.std_error = std::sqrt(ss / static_cast<double>(nb - 1) / static_cast<double>(nb));
    }
    // Separation growth alone bounds what a finite run can resolve.
    const double resolution = std::max(3.0 * est.std_error, 5.0 / total_time);
    est.resolved = est.lambda > resolution;
    return est;
}

}  // namespace hyperion
