#include "hyperion/environment.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "hyperion/errors.hpp"
#include "hyperion/rng.hpp"

namespace hyperion {

void NoiseParams::validate() const {
    if (!(sigma >= 0.0)) {
        throw ConfigError("noise.sigma must be >= 0");
    }
    if (!(tau_c > 0.0)) {
        throw ConfigError("noise.tau_c must be > 0");
    }
    if (!(c > 0.0 && c < 1.0)) {
        throw ConfigError("noise.c must lie in (0, 1)");
    }
    if (harmonic != 1 && harmonic != 2) {
        throw ConfigError("noise.harmonic must be 1 or 2");
    }
}

double NoiseParams::update_interval() const { return tau_c * std::abs(std::log(c)); }

NoiseRealization::NoiseRealization(NoiseParams params, double update_interval,
                                   std::vector<double> values)
    : params_(params), update_interval_(update_interval), values_(std::move(values)) {
    if (!(update_interval_ > 0.0) || values_.empty()) {
        throw ConfigError("noise realization needs a positive interval and at least one value");
    }
}

double NoiseRealization::value_at(double tau) const {
    const double k = std::floor(tau / update_interval_);
    if (k < 0.0 || k >= static_cast<double>(values_.size())) {
        throw ConfigError("noise realization queried outside its span at tau=" +
                          std::to_string(tau));
    }
    return values_[static_cast<std::size_t>(k)];
}

std::vector<double> NoiseRealization::boundaries_between(double lo, double hi) const {
    std::vector<double> out;
    const auto first = static_cast<long long>(std::floor(lo / update_interval_)) + 1;
    for (long long k = first;; ++k) {
        const double b = static_cast<double>(k) * update_interval_;
        if (b >= hi) {
            break;
        }
        if (b > lo) {
            out.push_back(b);
        }
    }
    return out;
}

std::vector<double> correlated_sequence(double c, std::size_t n, std::uint64_t seed) {
    if (!(c > 0.0 && c < 1.0)) {
        throw ConfigError("correlation constant c must lie in (0, 1)");
    }
    if (n == 0) {
        throw ConfigError("correlated_sequence needs n >= 1");
    }
    CounterRng rng(seed);
    std::vector<double> out(n);
    out[0] = rng.normal();
    for (std::size_t i = 1; i < n; ++i) {
        out[i] = c * out[i - 1] + (1.0 - c) * rng.normal();
    }
    return out;
}

double stationary_variance(double c) { return (1.0 - c) / (1.0 + c); }

NoiseRealization make_noise_realization(const NoiseParams& params, double tau_end, double dtau) {
    params.validate();
    if (!(tau_end > 0.0)) {
        throw ConfigError("noise realization needs tau_end > 0");
    }
    const double interval = params.update_interval();
    if (interval < dtau) {
        throw ConfigError("noise update interval " + std::to_string(interval) +
                          " is shorter than the integrator step " + std::to_string(dtau));
    }
    const auto n = static_cast<std::size_t>(std::floor(tau_end / interval)) + 1;
    return NoiseRealization(params, interval, correlated_sequence(params.c, n, params.seed));
}

double diffusion_parameter(const NoiseParams& params) {
    params.validate();
    return params.sigma * params.sigma * params.tau_c * (1.0 - params.c) /
           (2.0 * (1.0 + params.c));
}

DiffusionEstimate empirical_diffusion(const NoiseParams& params, std::size_t n_walks,
                                      double tau_end, std::uint64_t seed) {
    params.validate();
    if (n_walks < 2) {
        throw ConfigError("empirical_diffusion needs at least two walks");
    }
    if (!(tau_end > 0.0)) {
        throw ConfigError("empirical_diffusion needs tau_end > 0");
    }
    const double interval = params.update_interval();
    const auto full = static_cast<std::size_t>(std::floor(tau_end / interval));
    const double tail = tau_end - static_cast<double>(full) * interval;

    double sum = 0.0;
    double sum_sq = 0.0;
    for (std::size_t w = 0; w < n_walks; ++w) {
        const std::uint64_t key = derive_seed(seed, seed_domain::diffusion_walk, w);
        CounterRng angle_rng(mix64(key));
        const double sin_phi = std::sin(2.0 * std::numbers::pi * angle_rng.uniform());
        const auto r = correlated_sequence(params.c, full + 1, key);
        double integral = 0.0;
        for (std::size_t i = 0; i < full; ++i) {
            integral += r[i] * interval;
        }
        integral += r[full] * tail;
        const double j = params.sigma * sin_phi * integral;
        const double j2 = j * j;
        sum += j2;
        sum_sq += j2 * j2;
    }
    const double n = static_cast<double>(n_walks);
    const double mean = sum / n;
    const double var = (sum_sq / n - mean * mean) * n / (n - 1.0);
    DiffusionEstimate est;
    est.d_hat = mean / (2.0 * tau_end);
    est.std_error = std::sqrt(std::max(var, 0.0) / n) / (2.0 * tau_end);
    est.sufficient = est.d_hat > 0.0 ? est.std_error <= 0.05 * est.d_hat : params.sigma == 0.0;
    return est;
}

std::vector<double> autocovariance(std::span<const double> x, std::size_t max_lag) {
    const std::size_t n = x.size();
    if (n <= max_lag) {
        throw AnalysisError("autocovariance: sequence shorter than max_lag + 1");
    }
    double mean = 0.0;
    for (double v : x) {
        mean += v;
    }
    mean /= static_cast<double>(n);
    std::vector<double> out(max_lag + 1, 0.0);
    for (std::size_t k = 0; k <= max_lag; ++k) {
        double s = 0.0;
        for (std::size_t i = 0; i + k < n; ++i) {
            s += (x[i] - mean) * (x[i + k] - mean);
        }
        out[k] = s / static_cast<double>(n - k);
    }
    return out;
}

}  // namespace hyperion
