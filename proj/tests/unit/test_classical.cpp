#include <doctest.h>

#include <cmath>
#include <numbers>
#include <numeric>

#include "hyperion/classical.hpp"
#include "hyperion/errors.hpp"
#include "hyperion/orbit.hpp"

using namespace hyperion;

namespace {
constexpr double pi = std::numbers::pi;
}

TEST_CASE("free rotor keeps Jz and advances phi linearly") {
    const SystemParams p{0.0, 0.1, 0.05, 0.01};
    const OrbitSolution orbit = build_orbit_table({0.1, 1024});
    ClassicalEnsemble e = sample_initial_ensemble({10.0, 0.5, 0.3}, p, 64, 7);
    const auto phi0 = e.phi;
    const auto jz0 = e.jz;
    const double record[] = {5.0};
    evolve_ensemble(e, p, orbit, 5.0, nullptr, record, EnsembleObserver{});
    for (std::size_t i = 0; i < e.size(); ++i) {
        CHECK(e.jz[i] == jz0[i]);
        CHECK(e.phi[i] == doctest::Approx(phi0[i] + 5.0 * jz0[i]).epsilon(1e-12));
    }
}

TEST_CASE("rotating-frame energy is conserved on a circular orbit") {
    const SystemParams p{0.5, 0.0, 0.05, 1e-3};
    const OrbitSolution orbit = build_orbit_table({0.0, 1024});
    ClassicalEnsemble e = sample_initial_ensemble({4.0, std::sqrt(0.5), 0.0}, p, 200, 3);
    std::vector<double> e0(e.size());
    for (std::size_t i = 0; i < e.size(); ++i) {
        e0[i] = rotating_frame_energy(e.phi[i], e.jz[i], 0.0, 0.5);
    }
    const double record[] = {10.0};
    evolve_ensemble(e, p, orbit, 10.0, nullptr, record, EnsembleObserver{});
    const double scale = 3.0 * pi * pi * 0.5;
    for (std::size_t i = 0; i < e.size(); ++i) {
        const double en = rotating_frame_energy(e.phi[i], e.jz[i], 10.0, 0.5);
        CHECK(std::abs(en - e0[i]) / std::max(std::abs(e0[i]), scale) < 1e-9);
    }
}

TEST_CASE("halving the step changes the chaotic mean by less than 1e-6 inside the Lyapunov horizon") {
    const OrbitSolution orbit = build_orbit_table({0.1, 4096});
    double mean[2];
    for (int k = 0; k < 2; ++k) {
        const SystemParams p{0.5, 0.1, 0.05, 0.0025 / (1 << k)};
        ClassicalEnsemble e = sample_initial_ensemble({10.0, 0.5, 0.0}, p, 500, 11);
        const double record[] = {2.0};
        evolve_ensemble(e, p, orbit, 2.0, nullptr, record, EnsembleObserver{});
        mean[k] = ensemble_mean_jz(e);
    }
    CHECK(std::abs(mean[0] - mean[1]) < 1e-6);
}

TEST_CASE("initial sample has the requested moments and is order independent") {
    const SystemParams p{0.5, 0.1, 0.05, 1e-3};
    const InitialStateSpec s{10.0, 0.5, 0.2};
    const std::size_t n = 200000;
    const ClassicalEnsemble e = sample_initial_ensemble(s, p, n, 42);
    const double se = 0.5 / std::sqrt(static_cast<double>(n));
    CHECK(std::abs(ensemble_mean_jz(e) - 10.0) < 4.0 * se);
    CHECK(ensemble_std_jz(e) == doctest::Approx(0.5).epsilon(0.01));
    double m = 0.0, v = 0.0;
    for (double x : e.phi) {
        m += x;
    }
    m /= n;
    for (double x : e.phi) {
        v += (x - m) * (x - m);
    }
    CHECK(std::sqrt(v / n) == doctest::Approx(s.sigma_phi(0.05)).epsilon(0.01));
    // member i does not depend on the ensemble size
    const ClassicalEnsemble small = sample_initial_ensemble(s, p, 10, 42);
    for (std::size_t i = 0; i < 10; ++i) {
        CHECK(small.jz[i] == e.jz[i]);
        CHECK(small.phi[i] == e.phi[i]);
    }
}

TEST_CASE("Gauss-Hermite ensemble reproduces Gaussian moments exactly") {
    const SystemParams p{0.5, 0.1, 0.05, 1e-3};
    const ClassicalEnsemble g = gauss_hermite_ensemble({10.0, 0.5, 0.0}, p, 40, 20);
    CHECK(g.size() == 800);
    CHECK(std::accumulate(g.weight.begin(), g.weight.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(ensemble_mean_jz(g) == doctest::Approx(10.0).epsilon(1e-13));
    CHECK(ensemble_std_jz(g) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("evolution does not depend on the thread count") {
    const SystemParams p{0.5, 0.1, 0.05, 5e-3};
    const OrbitSolution orbit = build_orbit_table({0.1, 1024});
    const double record[] = {1.0, 3.0};
    std::vector<ClassicalEnsemble> out[2];
    for (unsigned t : {1U, 3U}) {
        out[t == 3] = evolve_ensemble(sample_initial_ensemble({10.0, 0.5, 0.0}, p, 1001, 5), p, orbit, 3.0,
                                      nullptr, record, EnsembleOptions{t});
    }
    for (std::size_t k = 0; k < 2; ++k) {
        CHECK(out[0][k].jz == out[1][k].jz);
        CHECK(out[0][k].phi == out[1][k].phi);
    }
}

TEST_CASE("histogram bins are centered at beta m") {
    const std::vector<double> jz = {0.0, 0.024, 0.026, -0.05, 0.1};
    const auto h = histogram_jz(jz, 0.05, 3);
    REQUIRE(h.size() == 7);
    CHECK(h[3] == doctest::Approx(0.4));  // 0 and 0.024
    CHECK(h[4] == doctest::Approx(0.2));  // 0.026
    CHECK(h[2] == doctest::Approx(0.2));
    CHECK(h[5] == doctest::Approx(0.2));
    CHECK(std::accumulate(h.begin(), h.end(), 0.0) == doctest::Approx(1.0));
    const std::vector<double> outside = {1.0};
    CHECK_THROWS_AS(histogram_jz(outside, 0.05, 3), NumericalError);
}

TEST_CASE("wrap_angle maps to [0, 2 pi)") {
    CHECK(wrap_angle(-0.5) == doctest::Approx(2.0 * pi - 0.5));
    CHECK(wrap_angle(7.0) == doctest::Approx(7.0 - 2.0 * pi));
    CHECK(wrap_angle(0.0) == 0.0);
}

TEST_CASE("Poincare section has one point per period and start") {
    const SystemParams p{0.5, 0.1, 0.05, 1e-3};
    const OrbitSolution orbit = build_orbit_table({0.1, 1024});
    const InitialStateSpec starts[] = {{4.0, 0.5, 0.0}, {10.0, 0.5, 1.0}};
    const auto pts = poincare_section(starts, p, orbit, 5);
    REQUIRE(pts.size() == 10);
    for (const auto& q : pts) {
        CHECK(q.phi >= 0.0);
        CHECK(q.phi < 2.0 * pi);
    }
}

TEST_CASE("Lyapunov exponent is unresolved for an integrable orbit") {
    const SystemParams p{0.5, 0.0, 0.05, 1e-3};
    const OrbitSolution orbit = build_orbit_table({0.0, 1024});
    const LyapunovEstimate l = lyapunov_exponent({4.0, 0.5, 0.0}, p, orbit, 200.0);
    CHECK(l.lambda < 0.1);
}

TEST_CASE("steps above 0.01 are rejected") {
    const SystemParams p{0.5, 0.1, 0.05, 0.02};
    const OrbitSolution orbit = build_orbit_table({0.1, 1024});
    ClassicalEnsemble e = sample_initial_ensemble({10.0, 0.5, 0.0}, p, 4, 1);
    const double record[] = {1.0};
    CHECK_THROWS_AS(evolve_ensemble(e, p, orbit, 1.0, nullptr, record, EnsembleObserver{}), ConfigError);
}
