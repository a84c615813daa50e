#include "hyperion/realization.hpp"

#include <algorithm>
#include <exception>
#include <optional>
#include <string>
#include <thread>

#include "hyperion/analysis.hpp"
#include "hyperion/errors.hpp"
#include "hyperion/rng.hpp"

namespace hyperion {

RealizationSeeds realization_seeds(std::uint64_t master, std::size_t index) {
    return {derive_seed(master, seed_domain::noise, index),
            derive_seed(master, seed_domain::classical_member, index)};
}

RealizationAverage run_realization_average(const ComparisonSpec& spec, const NoiseParams& noise,
                                           std::size_t count, const OrbitSolution& orbit,
                                           unsigned workers) {
    spec.validate();
    noise.validate();
    if (count == 0) {
        throw ConfigError("realization count must be >= 1");
    }
    const double tau_end = spec.record_at.back();
    ComparisonSpec member = spec;
    member.keep_distributions_at = spec.record_at;
    member.threads = 1;

    RealizationAverage out;
    out.tau = spec.record_at;
    out.cutoff = spec.basis_cutoff();
    const std::size_t records = spec.record_at.size();
    const std::size_t dim = 2 * static_cast<std::size_t>(out.cutoff) + 1;
    out.p_qm.assign(records, std::vector<double>(dim, 0.0));
    out.p_cl.assign(records, std::vector<double>(dim, 0.0));
    out.qm_jz.assign(records, 0.0);
    out.cl_jz.assign(records, 0.0);

    const std::size_t batch = std::max<std::size_t>(1, workers);
    for (std::size_t first = 0; first < count; first += batch) {
        const std::size_t n = std::min(batch, count - first);
        std::vector<std::optional<ComparisonTrace>> results(n);
        std::vector<std::exception_ptr> errors(n);
        auto work = [&](std::size_t k) {
            const std::size_t index = first + k;
            try {
                const RealizationSeeds seeds = realization_seeds(noise.seed, index);
                NoiseParams np = noise;
                np.seed = seeds.noise;
                const NoiseRealization r = make_noise_realization(np, tau_end, member.params.dtau);
                ComparisonSpec s = member;
                s.seed = seeds.ensemble;
                results[k] = run_comparison(s, orbit, &r);
            } catch (...) {
                errors[k] = std::current_exception();
            }
        };
        if (n == 1) {
            work(0);
        } else {
            std::vector<std::jthread> pool;
            for (std::size_t k = 0; k < n; ++k) {
                pool.emplace_back(work, k);
            }
        }
        for (std::size_t k = 0; k < n; ++k) {
            const std::size_t index = first + k;
            if (errors[k]) {
                try {
                    std::rethrow_exception(errors[k]);
                } catch (const std::exception& e) {
                    throw NumericalError("realization " + std::to_string(index) +
                                         " failed: " + e.what());
                }
            }
            const ComparisonTrace& tr = *results[k];
            for (std::size_t r = 0; r < records; ++r) {
                const auto& d = tr.distributions[r];
                for (std::size_t m = 0; m < dim; ++m) {
                    out.p_qm[r][m] += d.p_qm[m];
                    out.p_cl[r][m] += d.p_cl[m];
                }
                out.qm_jz[r] += tr.qm_jz[r];
                out.cl_jz[r] += tr.cl_jz[r];
            }
            out.qm_jz_trace.push_back(tr.qm_jz);
            out.cl_jz_trace.push_back(tr.cl_jz);
            out.seeds.push_back(realization_seeds(noise.seed, index));
        }
    }
    const double inv = 1.0 / static_cast<double>(count);
    for (std::size_t r = 0; r < records; ++r) {
        for (std::size_t m = 0; m < dim; ++m) {
            out.p_qm[r][m] *= inv;
            out.p_cl[r][m] *= inv;
        }
        out.qm_jz[r] *= inv;
        out.cl_jz[r] *= inv;
        out.one_norm.push_back(one_norm(out.p_cl[r], out.p_qm[r]));
    }
    return out;
}

}  // namespace hyperion
