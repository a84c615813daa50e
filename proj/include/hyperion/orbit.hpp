#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace hyperion {

struct OrbitParams {
    double eccentricity = 0.1;
    std::size_t n_samples = 4096;

    void validate() const;
};

/// Orbital coordinates at one instant. `theta` is the unwrapped true anomaly.
struct OrbitPoint {
    double r_over_a = 1.0;
    double theta = 0.0;
};

/// Exact two-body orbit from Kepler's equation, periapsis at tau = 0.
/// tau is time in orbital periods. Throws NumericalError if the eccentric
/// anomaly fails to converge.
OrbitPoint solve_kepler(double eccentricity, double tau);

/// Eccentric anomaly E with E - e sin E = mean_anomaly.
double eccentric_anomaly(double eccentricity, double mean_anomaly);

/// Precomputed one-period table with cubic Hermite lookup (exact derivatives
/// at the nodes). Immutable after construction.
class OrbitSolution {
public:
    explicit OrbitSolution(const OrbitParams& params);

    double eccentricity() const noexcept { return e_; }
    std::size_t size() const noexcept { return tau_.size(); }

    std::span<const double> tau_grid() const noexcept { return tau_; }
    std::span<const double> r_over_a() const noexcept { return r_; }
    std::span<const double> theta() const noexcept { return theta_; }

    /// Interpolated orbit at any tau, using r(tau+1) = r(tau) and
    /// theta(tau+1) = theta(tau) + 2 pi.
    OrbitPoint at(double tau) const;

    /// (a/r)^3 and theta at tau; what the equations of motion consume.
    struct Drive {
        double inv_r_cubed;
        double theta;
    };
    Drive drive(double tau) const;

private:
    double e_;
    std::vector<double> tau_;
    std::vector<double> r_;
    std::vector<double> theta_;
    std::vector<double> dr_;
    std::vector<double> dtheta_;
};

OrbitSolution build_orbit_table(const OrbitParams& params);

}  // namespace hyperion
