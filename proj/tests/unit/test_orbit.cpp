#include <doctest.h>

#include <array>
#include <cmath>
#include <numbers>

#include <boost/numeric/odeint.hpp>

#include "hyperion/errors.hpp"
#include "hyperion/orbit.hpp"

using namespace hyperion;

namespace {

constexpr double pi = std::numbers::pi;

// Two-body problem in units a = 1, T = 1 (GM = 4 pi^2), started at periapsis.
using State = std::array<double, 4>;

State integrate_two_body(double e, double tau) {
    const double gm = 4.0 * pi * pi;
    State s = {1.0 - e, 0.0, 0.0, 2.0 * pi * std::sqrt((1.0 + e) / (1.0 - e))};
    auto rhs = [gm](const State& x, State& dx, double) {
        const double r = std::hypot(x[0], x[1]);
        const double k = -gm / (r * r * r);
        dx = {x[2], x[3], k * x[0], k * x[1]};
    };
    namespace ode = boost::numeric::odeint;
    ode::integrate_adaptive(ode::make_controlled<ode::runge_kutta_dopri5<State>>(1e-13, 1e-13), rhs, s, 0.0,
                            tau, 1e-4);
    return s;
}

}  // namespace

TEST_CASE("Kepler solution matches a direct two-body integration") {
    for (double e : {0.0, 0.1, 0.5}) {
        for (double tau : {0.1, 0.37, 0.5, 0.93, 1.6}) {
            const State s = integrate_two_body(e, tau);
            const OrbitPoint p = solve_kepler(e, tau);
            CHECK(p.r_over_a == doctest::Approx(std::hypot(s[0], s[1])).epsilon(1e-9));
            const double theta = std::atan2(s[1], s[0]);
            CHECK(std::remainder(p.theta - theta, 2.0 * pi) == doctest::Approx(0.0).scale(1.0).epsilon(1e-8));
        }
    }
}

TEST_CASE("circular orbit is uniform rotation") {
    for (double tau : {0.0, 0.25, 1.75}) {
        const OrbitPoint p = solve_kepler(0.0, tau);
        CHECK(p.r_over_a == doctest::Approx(1.0));
        CHECK(p.theta == doctest::Approx(2.0 * pi * tau));
    }
}

TEST_CASE("periapsis, apoapsis and unwrapped anomaly") {
    const double e = 0.1;
    CHECK(solve_kepler(e, 0.0).r_over_a == doctest::Approx(1.0 - e));
    CHECK(solve_kepler(e, 0.5).r_over_a == doctest::Approx(1.0 + e));
    CHECK(solve_kepler(e, 0.5).theta == doctest::Approx(pi));
    CHECK(solve_kepler(e, 3.0).theta == doctest::Approx(6.0 * pi));
}

TEST_CASE("eccentric anomaly solves Kepler's equation") {
    for (double e : {0.0, 0.3, 0.9}) {
        for (double m : {0.01, 1.0, 3.0, 6.0}) {
            const double E = eccentric_anomaly(e, m);
            CHECK(E - e * std::sin(E) == doctest::Approx(m).epsilon(1e-14));
        }
    }
}

TEST_CASE("orbit table interpolates the exact orbit") {
    const OrbitSolution orbit = build_orbit_table({0.1, 4096});
    for (double tau : {0.0, 0.123, 0.5, 0.777, 2.31, 17.9}) {
        const OrbitPoint exact = solve_kepler(0.1, tau);
        const OrbitPoint table = orbit.at(tau);
        CHECK(table.r_over_a == doctest::Approx(exact.r_over_a).epsilon(1e-10));
        CHECK(table.theta == doctest::Approx(exact.theta).epsilon(1e-10));
        const auto d = orbit.drive(tau);
        CHECK(d.inv_r_cubed == doctest::Approx(std::pow(exact.r_over_a, -3.0)).epsilon(1e-9));
    }
}

TEST_CASE("orbit parameters are validated") {
    CHECK_THROWS_AS(build_orbit_table({1.0, 4096}), ConfigError);
    CHECK_THROWS_AS(build_orbit_table({-0.1, 4096}), ConfigError);
    CHECK_THROWS_AS(build_orbit_table({0.1, 4}), ConfigError);
}
