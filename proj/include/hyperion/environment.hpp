#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace hyperion {

/// Stochastic potential sigma R(tau) cos(harmonic * phi).
struct NoiseParams {
    double sigma = 0.0;     ///< V0 T^2 / I3
    double tau_c = 0.01;    ///< correlation time in orbital periods
    double c = 0.5;         ///< recurrence constant of the correlated sequence
    std::uint64_t seed = 0;
    int harmonic = 1;       ///< 1: cos(phi); 2: cos(2 phi) variant

    void validate() const;

    /// Spacing between successive values of R: tau_c |ln c|.
    double update_interval() const;
};

/// Piecewise-constant correlated drive. Value i holds on
/// [i * update_interval, (i + 1) * update_interval).
class NoiseRealization {
public:
    NoiseRealization(NoiseParams params, double update_interval, std::vector<double> values);

    const NoiseParams& params() const noexcept { return params_; }
    double update_interval() const noexcept { return update_interval_; }
    std::span<const double> values() const noexcept { return values_; }

    /// Time covered by the stored values.
    double span() const noexcept { return update_interval_ * static_cast<double>(values_.size()); }

    /// R(tau). Throws ConfigError outside [0, span()).
    double value_at(double tau) const;

    /// sigma * R(tau)
    double amplitude_at(double tau) const { return params_.sigma * value_at(tau); }

    /// Boundaries k * update_interval strictly inside (lo, hi).
    std::vector<double> boundaries_between(double lo, double hi) const;

private:
    NoiseParams params_;
    double update_interval_;
    std::vector<double> values_;
};

/// R_1 = r_1, R_{i+1} = c R_i + (1 - c) r_{i+1} with r_i standard normal.
std::vector<double> correlated_sequence(double c, std::size_t n, std::uint64_t seed);

/// Stationary variance (1 - c) / (1 + c) of the correlated sequence.
double stationary_variance(double c);

/// Realization covering [0, tau_end]. Throws ConfigError when the update
/// interval is shorter than the integrator step `dtau`.
NoiseRealization make_noise_realization(const NoiseParams& params, double tau_end, double dtau);

/// Momentum diffusion parameter. sigma^2 tau_c / 6 at c = 1/2; for other c
/// the continuum form sigma^2 tau_c (1 - c) / (2 (1 + c)).
double diffusion_parameter(const NoiseParams& params);

struct DiffusionEstimate {
    double d_hat = 0.0;
    double std_error = 0.0;
    bool sufficient = false;  ///< relative standard error <= 5%
};

/// Monte-Carlo D from free random walks dJ/dtau = sigma R(tau) sin(phi) with a
/// uniformly random frozen angle per walk; D_hat = <J^2> / (2 tau_end).
DiffusionEstimate empirical_diffusion(const NoiseParams& params, std::size_t n_walks,
                                      double tau_end, std::uint64_t seed);

/// Lag-k sample autocovariances (k = 0..max_lag) of a sequence.
std::vector<double> autocovariance(std::span<const double> x, std::size_t max_lag);

}  // namespace hyperion
