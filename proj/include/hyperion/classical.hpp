#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "hyperion/params.hpp"

namespace hyperion {

class OrbitSolution;
class NoiseRealization;

/// Sample of the classical phase-space density. Angles are kept unwrapped;
/// reduce with wrap_angle() at output boundaries. `weight` is empty for a
/// Monte-Carlo sample (equal weights) and holds normalized quadrature
/// weights for a Gauss-Hermite ensemble.
struct ClassicalEnsemble {
    std::vector<double> phi;
    std::vector<double> jz;
    std::vector<double> weight;
    std::uint64_t seed = 0;
    double tau = 0.0;

    std::size_t size() const noexcept { return jz.size(); }
    bool weighted() const noexcept { return !weight.empty(); }
};

/// Jz ~ Normal(j0, sigma_j^2), phi ~ Normal(phi0, sigma_phi^2) with
/// sigma_phi = beta / (2 sigma_j). Member i draws from its own counter
/// stream, so the sample does not depend on n or on evaluation order.
ClassicalEnsemble sample_initial_ensemble(const InitialStateSpec& spec, const SystemParams& params,
                                          std::size_t n, std::uint64_t seed);

/// Tensor Gauss-Hermite nodes over the same initial density: n_j nodes in
/// Jz times n_phi in phi, with product weights. For smooth (early-time or
/// integrable) flows the weighted means converge far faster than sampling.
ClassicalEnsemble gauss_hermite_ensemble(const InitialStateSpec& spec, const SystemParams& params,
                                         std::size_t n_j, std::size_t n_phi);

struct EnsembleOptions {
    unsigned threads = 1;
};

using EnsembleObserver = std::function<void(double tau, const ClassicalEnsemble&)>;

/// Fixed-step RK4 of phi' = Jz,
/// Jz' = -6 pi^2 alpha (a/r)^3 sin 2(phi - theta) + sigma R(tau) sin(k phi).
/// Advances from ens.tau to tau_end, calling `observer` at each record time.
/// Throws ConfigError for dtau > 0.01 and NumericalError on NaN.
void evolve_ensemble(ClassicalEnsemble& ens, const SystemParams& params, const OrbitSolution& orbit,
                     double tau_end, const NoiseRealization* noise,
                     std::span<const double> record_at, const EnsembleObserver& observer,
                     const EnsembleOptions& options = {});

/// Convenience form returning full copies at every record time.
std::vector<ClassicalEnsemble> evolve_ensemble(ClassicalEnsemble ens, const SystemParams& params,
                                               const OrbitSolution& orbit, double tau_end,
                                               const NoiseRealization* noise,
                                               std::span<const double> record_at,
                                               const EnsembleOptions& options = {});

/// Mean of Jz (weighted when the ensemble carries weights), summed in
/// index order.
double ensemble_mean_jz(const ClassicalEnsemble& ens);

/// Standard deviation of Jz.
double ensemble_std_jz(const ClassicalEnsemble& ens);

/// Counts / n (or summed weights) in bins of width beta centered at beta * m,
/// m in [-K, K]. Throws NumericalError listing the number of samples outside
/// the basis.
std::vector<double> histogram_jz(const ClassicalEnsemble& ens, double beta, int K);
std::vector<double> histogram_jz(std::span<const double> jz, double beta, int K);

/// Angle reduced to [0, 2 pi).
double wrap_angle(double phi);

struct PoincarePoint {
    std::size_t trajectory = 0;
    int period = 0;
    double phi = 0.0;  ///< reduced to [0, 2 pi)
    double jz = 0.0;
};

/// Stroboscopic section at integer tau = 1..n_periods for each start point.
std::vector<PoincarePoint> poincare_section(std::span<const InitialStateSpec> starts,
                                            const SystemParams& params, const OrbitSolution& orbit,
                                            int n_periods);

struct LyapunovEstimate {
    double lambda = 0.0;
    double std_error = 0.0;
    bool resolved = false;  ///< false: indistinguishable from zero
};

struct LyapunovOptions {
    double renorm_interval = 0.1;
    double initial_separation = 1e-8;
    int blocks = 20;
};

/// Benettin two-trajectory estimate of the largest Lyapunov exponent, per
/// unit tau, from the orbit starting at (spec.phi0, spec.j0).
LyapunovEstimate lyapunov_exponent(const InitialStateSpec& spec, const SystemParams& params,
                                   const OrbitSolution& orbit, double tau_total,
                                   const LyapunovOptions& options = {});

}  // namespace hyperion
