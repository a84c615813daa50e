#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "hyperion/classical.hpp"
#include "hyperion/params.hpp"
#include "hyperion/quantum.hpp"

namespace hyperion {

class OrbitSolution;
class NoiseRealization;

enum class ClassicalSampling {
    monte_carlo,    ///< ensemble_size members from the master seed
    gauss_hermite,  ///< quadrature_j x quadrature_phi weighted nodes
};

ClassicalSampling parse_classical_sampling(std::string_view name);
std::string_view to_string(ClassicalSampling sampling);

/// One quantum run and one classical ensemble from matching initial data.
struct ComparisonSpec {
    SystemParams params;             ///< params.dtau is the classical step
    InitialStateSpec initial;
    EvolutionControls quantum;
    int cutoff = 0;                  ///< 0: default_cutoff(beta)
    ClassicalSampling sampling = ClassicalSampling::monte_carlo;
    std::size_t ensemble_size = 10000;
    std::size_t quadrature_j = 200;
    std::size_t quadrature_phi = 80;
    std::uint64_t seed = 1;          ///< classical ensemble seed
    std::vector<double> record_at;   ///< ascending, > 0
    std::vector<double> keep_distributions_at;  ///< subset of record_at
    unsigned threads = 1;

    void validate() const;
    int basis_cutoff() const;
};

/// Probability vectors over m = -K..K at one record time.
struct DistributionSnapshot {
    double tau = 0.0;
    std::vector<double> p_qm;
    std::vector<double> p_cl;
};

struct ComparisonTrace {
    int cutoff = 0;
    double beta = 0.0;
    std::vector<double> tau;
    std::vector<double> qm_jz;
    std::vector<double> cl_jz;
    std::vector<double> cl_std;
    /// Error of cl_jz: sigma_m for sampling; for quadrature, the change
    /// against a run with two thirds of the nodes in each direction.
    std::vector<double> cl_error;
    std::vector<double> one_norm;  ///< |qm - cl|_1 at every record time
    std::vector<DistributionSnapshot> distributions;

    /// qm_jz - cl_jz per record time.
    std::vector<double> difference() const;
};

/// Evolves both pictures to the last record time, with the same noise
/// realization (or none) driving each. `on_classical`, when set, also sees
/// the main classical ensemble at every record time.
ComparisonTrace run_comparison(const ComparisonSpec& spec, const OrbitSolution& orbit,
                               const NoiseRealization* noise,
                               const EnsembleObserver& on_classical = {});

}  // namespace hyperion
