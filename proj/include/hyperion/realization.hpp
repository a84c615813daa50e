#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "hyperion/comparison.hpp"
#include "hyperion/environment.hpp"

namespace hyperion {

/// Noise seed and classical ensemble seed of realization `index`, split from
/// one master seed so adding realizations never changes earlier ones.
struct RealizationSeeds {
    std::uint64_t noise = 0;
    std::uint64_t ensemble = 0;
};
RealizationSeeds realization_seeds(std::uint64_t master, std::size_t index);

struct RealizationAverage {
    std::vector<double> tau;
    std::vector<std::vector<double>> p_qm;  ///< [record][m], uniform average
    std::vector<std::vector<double>> p_cl;
    std::vector<double> one_norm;           ///< of the averaged vectors
    std::vector<double> qm_jz;              ///< averaged over realizations
    std::vector<double> cl_jz;
    std::vector<std::vector<double>> qm_jz_trace;  ///< [realization][record]
    std::vector<std::vector<double>> cl_jz_trace;
    std::vector<RealizationSeeds> seeds;
    int cutoff = 0;
};

/// Runs `count` realizations of `spec` under `noise`. noise.seed is the
/// master seed for both the noise sequences and the classical sub-ensembles
/// (spec.seed is ignored); spec.ensemble_size is the sub-ensemble size.
/// Realization i feeds one noise sequence to both its quantum run and its
/// classical sub-ensemble. `workers` realizations run
/// concurrently; sums are formed in index order, so the result does not
/// depend on `workers`. Failures are rethrown naming the realization.
RealizationAverage run_realization_average(const ComparisonSpec& spec, const NoiseParams& noise,
                                           std::size_t count, const OrbitSolution& orbit,
                                           unsigned workers = 1);

}  // namespace hyperion
