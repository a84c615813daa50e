#include <doctest.h>

#include <cmath>

#include "hyperion/errors.hpp"
#include "hyperion/hyperion_params.hpp"
#include "hyperion/hyperion_report.hpp"

using namespace hyperion;

TEST_CASE("anisotropy from the semi-axes") {
    CHECK(alpha_from_axes(205e3, 130e3) == doctest::Approx((205.0 * 205 - 130.0 * 130) / (205.0 * 205 + 130.0 * 130)));
    CHECK(alpha_from_axes(1.0, 1.0) == 0.0);
    CHECK_THROWS_AS(alpha_from_axes(1.0, 2.0), ConfigError);
}

TEST_CASE("ellipsoid inertia and beta") {
    const BodyParams b;
    const Inertia in = moments_of_inertia(b);
    const double mass = 4.0 / 3.0 * M_PI * 1400.0 * 205e3 * 130e3 * 110e3;
    CHECK(in.mass == doctest::Approx(mass));
    CHECK(in.i3 == doctest::Approx(mass * (205e3 * 205e3 + 130e3 * 130e3) / 5.0));
    CHECK(in.i1 < in.i2);
    CHECK(in.i2 < in.i3);
    CHECK(beta_physical(b) == doctest::Approx(1.05e-34 * 1.8e6 / in.i3));
}

TEST_CASE("dust viscosity does not depend on the number density") {
    DustParams d;
    const double eta = dust_viscosity(d);
    d.number_density *= 10.0;
    CHECK(dust_viscosity(d) == doctest::Approx(eta));
    const double v = std::sqrt(3.0 * boltzmann * 135.0 / 1e-13);
    CHECK(eta == doctest::Approx(1e-13 * v / (3.0 * std::sqrt(2.0) * M_PI * 1e-12)));
}

TEST_CASE("scaling-law extrapolations") {
    CHECK(predicted_qc_difference(1e-3, 2.0) == doctest::Approx(2.0 * 1e-2));
    CHECK(predicted_one_norm(1e-3, 1e-12, 0.5) == doctest::Approx(0.5 * std::pow(1e6, 1.0 / 6.0)));
    const double ds = resolution_for_one_norm(1e-3, 0.01);
    CHECK(0.58 * std::pow(1e-3 / ds, 0.44) == doctest::Approx(0.01));
}

TEST_CASE("report carries every quantity with a note") {
    const json r = hyperion_report(BodyParams{}, DustParams{}, ScalingCalibration{});
    for (const char* k : {"alpha", "i3", "beta", "eta", "D", "max_jz_difference", "max_one_norm"}) {
        REQUIRE(r.contains(k));
        CHECK(r[k]["note"].get<std::string>().size() > 0);
        CHECK(r[k]["value"].get<double>() > 0.0);
    }
    CHECK(format_hyperion_report(r).find("beta") != std::string::npos);
}
