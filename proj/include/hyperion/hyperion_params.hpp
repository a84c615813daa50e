#pragma once

namespace hyperion {

inline constexpr double boltzmann = 1.380649e-23;  // J/K

/// Uniform ellipsoid body. SI units throughout.
struct BodyParams {
    double r1 = 205e3;        ///< semi-axes, m, r1 >= r2 >= r3
    double r2 = 130e3;
    double r3 = 110e3;
    double density = 1400.0;  ///< kg/m^3
    double period = 1.8e6;    ///< orbital period T, s
    double hbar = 1.05e-34;   ///< J s

    void validate() const;
};

/// Dust treated as a dilute gas around a spherical body of radius body_radius.
struct DustParams {
    double number_density = 4e-8;  ///< m^-3
    double grain_mass = 1e-13;     ///< kg
    double grain_radius = 1e-6;    ///< m
    double temperature = 135.0;    ///< K
    double body_radius = 150e3;    ///< m

    void validate() const;
};

struct Inertia {
    double mass = 0.0;
    double i1 = 0.0;
    double i2 = 0.0;
    double i3 = 0.0;
};

/// I3 = M (r1^2 + r2^2) / 5 and cyclic, M = 4/3 pi rho r1 r2 r3.
Inertia moments_of_inertia(const BodyParams& body);

/// (r1^2 - r2^2) / (r1^2 + r2^2).
double alpha_from_axes(double r1, double r2);

/// hbar T / I3.
double beta_physical(const BodyParams& body);

/// 3-D thermal rms speed sqrt(3 k T / m).
double thermal_speed(const DustParams& dust);

/// Mean free path 1 / (n pi r^2).
double mean_free_path(const DustParams& dust);

/// n m v L / (3 sqrt 2), Pa s.
double dust_viscosity(const DustParams& dust);

/// Dimensionless momentum diffusion 8 pi k T R^3 eta T_orb^3 / I3^2.
double dust_diffusion(const DustParams& dust, const BodyParams& body);

/// Maximum <Jz> QC difference from the saturation-regime law
/// prefactor * beta^(2/3).
double predicted_qc_difference(double beta, double prefactor);

/// Maximum one-norm from the collapse law prefactor * (beta^2 / D)^(1/6).
double predicted_one_norm(double beta, double d, double prefactor);

/// Smoothing half-width at which prefactor * (beta / delta_s)^exponent
/// equals `target`.
double resolution_for_one_norm(double beta, double target, double prefactor = 0.58,
                               double exponent = 0.44);

}  // namespace hyperion
