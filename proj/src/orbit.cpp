#include "hyperion/orbit.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "hyperion/errors.hpp"

namespace hyperion {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;
constexpr int newton_cap = 50;
constexpr int bisection_cap = 200;
constexpr double residual_tol = 1e-13;

void check_eccentricity(double e) {
    if (!(e >= 0.0 && e < 1.0)) {
        throw ConfigError("eccentricity must satisfy 0 <= e < 1, got " + std::to_string(e));
    }
}

struct Sample {
    double r, theta, dr, dtheta;
};

// Orbit and its tau-derivatives at tau in [0, 1).
Sample sample_period(double e, double frac) {
    const double mean_anomaly = two_pi * frac;
    const double ecc_anomaly = eccentric_anomaly(e, mean_anomaly);
    const double cos_e = std::cos(ecc_anomaly);
    const double sin_e = std::sin(ecc_anomaly);
    const double r = 1.0 - e * cos_e;
    // E/2 in [0, pi) keeps the true anomaly in [0, 2 pi) and continuous.
    const double half = 0.5 * ecc_anomaly;
    const double theta =
        2.0 * std::atan2(std::sqrt(1.0 + e) * std::sin(half), std::sqrt(1.0 - e) * std::cos(half));
    const double de_dtau = two_pi / r;
    return {r, theta, e * sin_e * de_dtau, two_pi * std::sqrt(1.0 - e * e) / (r * r)};
}

}  // namespace

void OrbitParams::validate() const {
    check_eccentricity(eccentricity);
    if (n_samples < 16) {
        throw ConfigError("orbit table needs at least 16 samples");
    }
}

double eccentric_anomaly(double e, double mean_anomaly) {
    check_eccentricity(e);
    const auto residual = [&](double ecc) { return ecc - e * std::sin(ecc) - mean_anomaly; };

    double ecc = mean_anomaly + e * std::sin(mean_anomaly);
    for (int it = 0; it < newton_cap; ++it) {
        const double f = residual(ecc);
        const double step = f / (1.0 - e * std::cos(ecc));
        ecc -= step;
        if (std::abs(step) <= 1e-15 * (1.0 + std::abs(ecc))) {
            if (std::abs(residual(ecc)) < residual_tol) {
                return ecc;
            }
            break;
        }
    }

    // Newton stalled (only plausible for e close to 1): bracket E - M in [-e, e].
    double lo = mean_anomaly - e;
    double hi = mean_anomaly + e;
    for (int it = 0; it < bisection_cap && hi - lo > 1e-16 * (1.0 + std::abs(lo)); ++it) {
        const double mid = 0.5 * (lo + hi);
        (residual(mid) < 0.0 ? lo : hi) = mid;
    }
    ecc = 0.5 * (lo + hi);
    if (!(std::abs(residual(ecc)) < residual_tol)) {
        throw NumericalError("Kepler equation did not converge for e=" + std::to_string(e) +
                             ", M=" + std::to_string(mean_anomaly));
    }
    return ecc;
}

OrbitPoint solve_kepler(double e, double tau) {
    check_eccentricity(e);
    const double periods = std::floor(tau);
    const Sample s = sample_period(e, tau - periods);
    return {s.r, s.theta + two_pi * periods};
}

OrbitSolution::OrbitSolution(const OrbitParams& params) : e_(params.eccentricity) {
    params.validate();
    const std::size_t n = params.n_samples;
    tau_.resize(n);
    r_.resize(n);
    theta_.resize(n);
    dr_.resize(n);
    dtheta_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double tau = static_cast<double>(i) / static_cast<double>(n);
        const Sample s = sample_period(e_, tau);
        tau_[i] = tau;
        r_[i] = s.r;
        theta_[i] = s.theta;
        dr_[i] = s.dr;
        dtheta_[i] = s.dtheta;
    }
}

OrbitPoint OrbitSolution::at(double tau) const {
    const double periods = std::floor(tau);
    const double n = static_cast<double>(tau_.size());
    const double x = (tau - periods) * n;
    std::size_t i = static_cast<std::size_t>(x);
    if (i >= tau_.size()) {
        i = tau_.size() - 1;
    }
    const double t = x - static_cast<double>(i);
    const std::size_t j = (i + 1 == tau_.size()) ? 0 : i + 1;
    const double theta_j = theta_[j] + (j == 0 ? two_pi : 0.0);
    const double h = 1.0 / n;

    const double t2 = t * t;
    const double t3 = t2 * t;
    const double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    const double h10 = t3 - 2.0 * t2 + t;
    const double h01 = -2.0 * t3 + 3.0 * t2;
    const double h11 = t3 - t2;

    const double r = h00 * r_[i] + h10 * h * dr_[i] + h01 * r_[j] + h11 * h * dr_[j];
    const double theta =
        h00 * theta_[i] + h10 * h * dtheta_[i] + h01 * theta_j + h11 * h * dtheta_[j];
    return {r, theta + two_pi * periods};
}

OrbitSolution::Drive OrbitSolution::drive(double tau) const {
    const OrbitPoint p = at(tau);
    return {1.0 / (p.r_over_a * p.r_over_a * p.r_over_a), p.theta};
}

OrbitSolution build_orbit_table(const OrbitParams& params) { return OrbitSolution(params); }

}  // namespace hyperion
