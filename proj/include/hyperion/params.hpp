#pragma once

#include <cmath>
#include <numbers>

namespace hyperion {

/// Dimensionless model constants and the integrator step.
struct SystemParams {
    double alpha = 0.5;   ///< anisotropy (I2 - I1) / I3
    double e = 0.1;       ///< orbital eccentricity
    double beta = 0.05;   ///< dimensionless hbar, hbar T / I3
    double dtau = 1e-4;   ///< integrator step in orbital periods

    void validate() const;
};

/// Gaussian wave packet / classical density parameters.
struct InitialStateSpec {
    double j0 = 10.0;       ///< mean dimensionless angular momentum
    double sigma_j = 0.5;   ///< standard deviation of Jz
    double phi0 = 0.0;      ///< central angle (radians)

    void validate() const;

    /// Angular width of the matching minimum-uncertainty packet.
    double sigma_phi(double beta) const { return beta / (2.0 * sigma_j); }
};

/// Tidal torque prefactor: dJz/dtau = -torque_scale * alpha (a/r)^3 sin 2(phi - theta).
inline constexpr double torque_scale = 6.0 * std::numbers::pi * std::numbers::pi;

/// Characteristic tidal potential amplitude 3 sqrt(2) pi^2 alpha, used to
/// express the environmental amplitude as sigma / V_ch.
inline double characteristic_potential(double alpha) {
    return 3.0 * std::numbers::sqrt2 * std::numbers::pi * std::numbers::pi * alpha;
}

/// Rotating-frame energy of the circular-orbit (e = 0) problem,
/// (Jz - 2 pi)^2 / 2 - 3 pi^2 alpha cos 2 Phi with Phi = phi - 2 pi tau.
inline double rotating_frame_energy(double phi, double jz, double tau, double alpha) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    const double big_phi = phi - two_pi * tau;
    const double dj = jz - two_pi;
    return 0.5 * dj * dj -
           3.0 * std::numbers::pi * std::numbers::pi * alpha * std::cos(2.0 * big_phi);
}

}  // namespace hyperion
