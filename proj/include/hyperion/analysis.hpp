#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace hyperion {

/// Classical and quantum probability vectors over the same m range.
struct DistributionPair {
    std::vector<double> p_cl;
    std::vector<double> p_qm;
    double beta = 0.0;

    /// Equal sizes, each summing to one within 1e-12. Throws AnalysisError.
    void validate() const;
};

/// Sum over m of |P_cl(m) - P_qm(m)|, in [0, 2].
double one_norm(const DistributionPair& pair);
double one_norm(std::span<const double> p, std::span<const double> q);

/// Convolution with the unit-area triangular kernel of half-width delta_s
/// on the Jz axis (bin spacing beta). The result is again a per-bin
/// probability vector; divide by beta for a density. Mass the kernel would
/// push past either end of the range is kept in the edge bin, so the total
/// is preserved. Throws AnalysisError when delta_s < beta.
std::vector<double> triangular_smooth(std::span<const double> p, double beta, double delta_s);

/// Statistical error of an ensemble mean, sigma / sqrt(n).
double sigma_m(double sigma, std::size_t n);

struct ScalingFit {
    double exponent = 0.0;
    double prefactor = 0.0;
    double r_squared = 0.0;
    double exponent_std_error = 0.0;
    std::vector<double> residuals;  ///< log(y) - fitted log(y)
};

/// y = prefactor * x^exponent by unweighted least squares on (log x, log y).
/// Needs at least three strictly positive points.
ScalingFit fit_power_law(std::span<const double> x, std::span<const double> y);

struct ExponentialFit {
    double rate = 0.0;
    double log_amplitude = 0.0;  ///< log y extrapolated to tau = 0
    double r_squared = 0.0;
    std::size_t points = 0;
};

/// Slope of log y against tau for samples with tau in [tau_lo, tau_hi].
ExponentialFit fit_exponential(std::span<const double> tau, std::span<const double> y,
                               double tau_lo, double tau_hi);

struct DecayFit {
    double tau_d = 0.0;
    double amplitude = 0.0;
    double floor = 0.0;
    double tau_start = 0.0;  ///< time of the maximum the fit starts from
    double rms_residual = 0.0;
    bool decaying = false;   ///< false: no decay resolved within the data span
};

/// y = floor + amplitude exp(-(tau - tau_start) / tau_d) fitted from the
/// maximum of y onward. The rate is found by golden-section search with
/// floor and amplitude solved linearly at each trial rate.
DecayFit fit_decay_time(std::span<const double> tau, std::span<const double> y);

/// Mean of the samples with tau in [tau_lo, tau_hi].
double time_average(std::span<const double> tau, std::span<const double> y, double tau_lo = 20.0,
                    double tau_hi = 100.0);

struct Peak {
    double value = 0.0;  ///< max |y|
    double tau = 0.0;
};

/// Largest |y| over samples with tau in [tau_lo, tau_hi].
Peak peak_abs(std::span<const double> tau, std::span<const double> y, double tau_lo,
              double tau_hi);

struct Envelope {
    std::vector<double> tau;
    std::vector<double> value;
};

/// Upper envelope of |y|: the largest sample in each consecutive bin of
/// width `bin` starting at tau.front(), placed at the time it occurs.
Envelope envelope(std::span<const double> tau, std::span<const double> y, double bin);

/// Expected one-norm between a probability vector p and a multinomial
/// estimate of it from n samples, sum sqrt(2 p (1 - p) / (pi n)) in the
/// normal approximation. The statistical floor of a sampled |qm - cl|_1.
double one_norm_floor(std::span<const double> p, double n);

/// xi = beta^2 / D.
double collapse_parameter(double beta, double d);

/// Power-law fit of saturation-regime one-norms against beta / delta_s.
ScalingFit smoothing_scaling_check(std::span<const double> beta, std::span<const double> delta_s,
                                   std::span<const double> one_norms);

}  // namespace hyperion
