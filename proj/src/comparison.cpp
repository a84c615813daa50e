#include "hyperion/comparison.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hyperion/analysis.hpp"
#include "hyperion/classical.hpp"
#include "hyperion/errors.hpp"

namespace hyperion {

ClassicalSampling parse_classical_sampling(std::string_view name) {
    if (name == "monte_carlo") {
        return ClassicalSampling::monte_carlo;
    }
    if (name == "gauss_hermite") {
        return ClassicalSampling::gauss_hermite;
    }
    throw ConfigError("unknown classical sampling '" + std::string(name) + "'");
}

std::string_view to_string(ClassicalSampling sampling) {
    return sampling == ClassicalSampling::monte_carlo ? "monte_carlo" : "gauss_hermite";
}

void ComparisonSpec::validate() const {
    params.validate();
    initial.validate();
    quantum.validate();
    if (ensemble_size == 0) {
        throw ConfigError("ensemble_size must be >= 1");
    }
    if (sampling == ClassicalSampling::gauss_hermite && (quadrature_j < 3 || quadrature_phi < 3)) {
        throw ConfigError("quadrature orders must be >= 3");
    }
    if (record_at.empty()) {
        throw ConfigError("comparison needs at least one record time");
    }
    if (!(record_at.front() > 0.0) || !std::is_sorted(record_at.begin(), record_at.end()) ||
        std::adjacent_find(record_at.begin(), record_at.end()) != record_at.end()) {
        throw ConfigError("record times must be positive and strictly increasing");
    }
    for (double t : keep_distributions_at) {
        if (!std::binary_search(record_at.begin(), record_at.end(), t)) {
            throw ConfigError("distribution time " + std::to_string(t) +
                              " is not one of the record times");
        }
    }
    if (cutoff < 0) {
        throw ConfigError("cutoff must be >= 0");
    }
}

int ComparisonSpec::basis_cutoff() const {
    return cutoff > 0 ? cutoff : default_cutoff(params.beta);
}

std::vector<double> ComparisonTrace::difference() const {
    std::vector<double> d(tau.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        d[i] = qm_jz[i] - cl_jz[i];
    }
    return d;
}

ComparisonTrace run_comparison(const ComparisonSpec& spec, const OrbitSolution& orbit,
                               const NoiseRealization* noise,
                               const EnsembleObserver& on_classical) {
    spec.validate();
    const int K = spec.basis_cutoff();
    const double tau_end = spec.record_at.back();
    auto keep = [&spec](double t) {
        return std::binary_search(spec.keep_distributions_at.begin(),
                                  spec.keep_distributions_at.end(), t);
    };

    ComparisonTrace out;
    out.cutoff = K;
    out.beta = spec.params.beta;
    std::vector<std::vector<double>> p_qm;
    p_qm.reserve(spec.record_at.size());

    QuantumState psi = init_quantum_state(spec.initial, spec.params, K);
    evolve_quantum(psi, spec.params, orbit, tau_end, spec.quantum, noise, spec.record_at,
                   [&](double t, const QuantumState& s) {
                       out.tau.push_back(t);
                       out.qm_jz.push_back(expectation_jz(s));
                       p_qm.push_back(probability_vector(s));
                   });

    const bool quadrature = spec.sampling == ClassicalSampling::gauss_hermite;
    ClassicalEnsemble ens =
        quadrature ? gauss_hermite_ensemble(spec.initial, spec.params, spec.quadrature_j,
                                            spec.quadrature_phi)
                   : sample_initial_ensemble(spec.initial, spec.params, spec.ensemble_size, spec.seed);
    std::size_t index = 0;
    evolve_ensemble(
        ens, spec.params, orbit, tau_end, noise, spec.record_at,
        [&](double t, const ClassicalEnsemble& e) {
            if (on_classical) {
                on_classical(t, e);
            }
            out.cl_jz.push_back(ensemble_mean_jz(e));
            out.cl_std.push_back(ensemble_std_jz(e));
            if (!quadrature) {
                out.cl_error.push_back(sigma_m(out.cl_std.back(), e.size()));
            }
            auto p_cl = histogram_jz(e, spec.params.beta, K);
            out.one_norm.push_back(one_norm(p_cl, p_qm[index]));
            if (keep(t)) {
                out.distributions.push_back({t, std::move(p_qm[index]), std::move(p_cl)});
            }
            p_qm[index].clear();
            p_qm[index].shrink_to_fit();
            ++index;
        },
        EnsembleOptions{spec.threads});

    if (quadrature) {
        ClassicalEnsemble coarse = gauss_hermite_ensemble(
            spec.initial, spec.params, std::max<std::size_t>(2, spec.quadrature_j * 2 / 3),
            std::max<std::size_t>(2, spec.quadrature_phi * 2 / 3));
        std::size_t k = 0;
        evolve_ensemble(
            coarse, spec.params, orbit, tau_end, noise, spec.record_at,
            [&](double, const ClassicalEnsemble& e) {
                out.cl_error.push_back(std::abs(ensemble_mean_jz(e) - out.cl_jz[k]));
                ++k;
            },
            EnsembleOptions{spec.threads});
    }
    return out;
}

}  // namespace hyperion
