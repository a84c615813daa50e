#include "hyperion/hyperion_report.hpp"

#include <cstdio>
#include <sstream>

namespace hyperion {

namespace {

json entry(double value, const char* unit, std::string note) {
    return {{"value", value}, {"unit", unit}, {"note", std::move(note)}};
}

}  // namespace

json hyperion_report(const BodyParams& body, const DustParams& dust, const ScalingCalibration& cal) {
    body.validate();
    dust.validate();
    const Inertia in = moments_of_inertia(body);
    const double alpha = alpha_from_axes(body.r1, body.r2);
    const double beta = beta_physical(body);
    const double eta = dust_viscosity(dust);
    const double d = dust_diffusion(dust, body);
    const double dq = predicted_qc_difference(beta, cal.jz_prefactor);
    const double norm = predicted_one_norm(beta, d, cal.norm_prefactor);
    const double ds = resolution_for_one_norm(beta, 0.01);

    json r;
    r["inputs"] = {{"r1", body.r1},
                   {"r2", body.r2},
                   {"r3", body.r3},
                   {"density", body.density},
                   {"period", body.period},
                   {"hbar", body.hbar},
                   {"dust_number_density", dust.number_density},
                   {"dust_grain_mass", dust.grain_mass},
                   {"dust_grain_radius", dust.grain_radius},
                   {"dust_temperature", dust.temperature},
                   {"body_radius", dust.body_radius}};
    r["calibration"] = {{"jz_prefactor", cal.jz_prefactor},
                        {"norm_prefactor", cal.norm_prefactor},
                        {"source", cal.source}};
    r["alpha"] = entry(alpha, "1", "(r1^2 - r2^2) / (r1^2 + r2^2) from the semi-axes");
    r["mass"] = entry(in.mass, "kg", "uniform ellipsoid, 4/3 pi rho r1 r2 r3");
    r["i3"] = entry(in.i3, "kg m^2", "M (r1^2 + r2^2) / 5");
    r["beta"] = entry(beta, "1", "hbar T / I3; of order 1e-58 (a quoted 9.3e-54 does not follow from these inputs)");
    r["thermal_speed"] = entry(thermal_speed(dust), "m/s", "sqrt(3 k T / m) for the dust grains");
    r["mean_free_path"] = entry(mean_free_path(dust), "m", "1 / (n pi r^2)");
    r["eta"] = entry(eta, "Pa s", "dilute-gas viscosity n m v L / (3 sqrt 2)");
    r["D"] = entry(d, "1", "8 pi k T R^3 eta T_orb^3 / I3^2");
    r["xi"] = entry(beta * beta / d, "1", "beta^2 / D");
    r["max_jz_difference"] =
        entry(dq, "1", "jz_prefactor * beta^(2/3), saturation-regime law extrapolated in beta");
    r["max_one_norm"] =
        entry(norm, "1", "norm_prefactor * (beta^2 / D)^(1/6), collapse law extrapolated in xi");
    r["resolution_for_one_norm_0.01"] =
        entry(ds, "1", "smoothing half-width in Jz (units of I3 / T) giving 0.58 (beta / ds)^0.44 = 0.01");
    return r;
}

std::string format_hyperion_report(const json& r) {
    std::ostringstream out;
    auto line = [&](const char* label, const char* key) {
        const json& e = r.at(key);
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.4g", e.at("value").get<double>());
        out << label << buf;
        if (e.at("unit") != "1") {
            out << ' ' << e.at("unit").get<std::string>();
        }
        out << "    [" << e.at("note").get<std::string>() << "]\n";
    };
    out << "Hyperion\n";
    line("  alpha                 ", "alpha");
    line("  mass                  ", "mass");
    line("  I3                    ", "i3");
    line("  beta                  ", "beta");
    out << "Dust environment\n";
    line("  thermal speed         ", "thermal_speed");
    line("  mean free path        ", "mean_free_path");
    line("  eta                   ", "eta");
    line("  D                     ", "D");
    line("  beta^2/D              ", "xi");
    out << "Extrapolated QC differences (calibration: " << r["calibration"]["source"].get<std::string>()
        << ")\n";
    line("  max <Jz> difference   ", "max_jz_difference");
    line("  max |qm-cl|_1         ", "max_one_norm");
    line("  resolution for 0.01   ", "resolution_for_one_norm_0.01");
    return out.str();
}

}  // namespace hyperion
