#include "hyperion/hyperion_params.hpp"

#include <cmath>
#include <numbers>

#include "hyperion/errors.hpp"

namespace hyperion {

namespace {
constexpr double pi = std::numbers::pi;
}

void BodyParams::validate() const {
    if (!(r3 > 0.0) || !(r2 >= r3) || !(r1 >= r2)) {
        throw ConfigError("body semi-axes must satisfy r1 >= r2 >= r3 > 0");
    }
    if (!(density > 0.0) || !(period > 0.0) || !(hbar > 0.0)) {
        throw ConfigError("body density, period and hbar must be > 0");
    }
}

void DustParams::validate() const {
    if (!(number_density > 0.0) || !(grain_mass > 0.0) || !(grain_radius > 0.0) ||
        !(temperature > 0.0) || !(body_radius > 0.0)) {
        throw ConfigError("dust parameters must all be > 0");
    }
}

Inertia moments_of_inertia(const BodyParams& body) {
    body.validate();
    Inertia in;
    in.mass = 4.0 / 3.0 * pi * body.density * body.r1 * body.r2 * body.r3;
    const double a = body.r1 * body.r1;
    const double b = body.r2 * body.r2;
    const double c = body.r3 * body.r3;
    in.i1 = in.mass * (b + c) / 5.0;
    in.i2 = in.mass * (a + c) / 5.0;
    in.i3 = in.mass * (a + b) / 5.0;
    return in;
}

double alpha_from_axes(double r1, double r2) {
    if (!(r2 > 0.0) || !(r1 >= r2)) {
        throw ConfigError("alpha_from_axes needs r1 >= r2 > 0");
    }
    return (r1 * r1 - r2 * r2) / (r1 * r1 + r2 * r2);
}

double beta_physical(const BodyParams& body) {
    return body.hbar * body.period / moments_of_inertia(body).i3;
}

double thermal_speed(const DustParams& dust) {
    dust.validate();
    return std::sqrt(3.0 * boltzmann * dust.temperature / dust.grain_mass);
}

double mean_free_path(const DustParams& dust) {
    dust.validate();
    return 1.0 / (dust.number_density * pi * dust.grain_radius * dust.grain_radius);
}

double dust_viscosity(const DustParams& dust) {
    return dust.number_density * dust.grain_mass * thermal_speed(dust) * mean_free_path(dust) /
           (3.0 * std::numbers::sqrt2);
}

double dust_diffusion(const DustParams& dust, const BodyParams& body) {
    const double i3 = moments_of_inertia(body).i3;
    const double r = dust.body_radius;
    const double t = body.period;
    return 8.0 * pi * boltzmann * dust.temperature * r * r * r * dust_viscosity(dust) * t * t * t /
           (i3 * i3);
}

double predicted_qc_difference(double beta, double prefactor) {
    if (!(beta > 0.0)) {
        throw ConfigError("beta must be > 0");
    }
    return prefactor * std::pow(beta, 2.0 / 3.0);
}

double predicted_one_norm(double beta, double d, double prefactor) {
    if (!(beta > 0.0) || !(d > 0.0)) {
        throw ConfigError("beta and D must be > 0");
    }
    return prefactor * std::pow(beta * beta / d, 1.0 / 6.0);
}

double resolution_for_one_norm(double beta, double target, double prefactor, double exponent) {
    if (!(beta > 0.0) || !(target > 0.0) || !(prefactor > 0.0) || !(exponent > 0.0)) {
        throw ConfigError("resolution_for_one_norm inputs must be > 0");
    }
    return beta / std::pow(target / prefactor, 1.0 / exponent);
}

}  // namespace hyperion
