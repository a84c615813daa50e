#include <doctest.h>

#include <cmath>

#include "hyperion/errors.hpp"
#include "hyperion/orbit.hpp"
#include "hyperion/quantum.hpp"

using namespace hyperion;

namespace {

QuantumState evolved(QuantumState s, const SystemParams& p, const OrbitSolution& orbit, double tau,
                     EvolutionControls c = {}) {
    const double record[] = {tau};
    evolve_quantum(s, p, orbit, tau, c, nullptr, record, {});
    return s;
}

}  // namespace

TEST_CASE("cutoff rule") {
    CHECK(default_cutoff(0.05) == 416);
    CHECK(default_cutoff(0.5) == 56);
    CHECK(default_cutoff(0.0125) == 1616);
}

TEST_CASE("initial packet is normalized with the requested mean") {
    const SystemParams p{0.5, 0.1, 0.05, 1e-3};
    const QuantumState s = init_quantum_state({10.0, 0.5, 0.0}, p, default_cutoff(0.05));
    CHECK(s.norm_squared() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(expectation_jz(s) == doctest::Approx(10.0).epsilon(1e-12));
    // Var(Jz) = sigma_j^2 up to the discreteness of the lattice
    const double var = expectation_jz2(s) - 100.0;
    CHECK(var == doctest::Approx(0.25).epsilon(1e-6));
}

TEST_CASE("free rotor phases are exact") {
    const SystemParams p{0.0, 0.1, 0.05, 1e-3};
    const OrbitSolution orbit = build_orbit_table({0.1, 1024});
    const int K = default_cutoff(p.beta);
    const QuantumState s0 = init_quantum_state({2.0, 0.5, 0.4}, p, K);
    for (auto method : {QuantumMethod::split_operator, QuantumMethod::crank_nicolson}) {
        EvolutionControls c;
        c.method = method;
        c.dtau = method == QuantumMethod::split_operator ? 1e-3 : 1e-4;
        const QuantumState s = evolved(s0, p, orbit, 0.5, c);
        double worst = 0.0;
        for (int m = -K; m <= K; ++m) {
            const cplx exact = s0.at(m) * std::polar(1.0, -0.5 * p.beta * m * m * 0.5);
            worst = std::max(worst, std::abs(s.at(m) - exact));
        }
        // the Cayley form has a phase error of order (beta m^2 dtau)^3 per step
        CHECK(worst < (method == QuantumMethod::split_operator ? 1e-12 : 1e-3));
    }
}

TEST_CASE("chaotic evolution conserves the norm and reverses in time") {
    const SystemParams p{0.5, 0.1, 0.05, 1e-3};
    const OrbitSolution orbit = build_orbit_table({0.1, 4096});
    const QuantumState s0 = init_quantum_state({10.0, 0.5, 0.0}, p, default_cutoff(p.beta));
    const QuantumState s1 = evolved(s0, p, orbit, 2.0);
    CHECK(std::abs(s1.norm_squared() - 1.0) < 1e-11);
    const QuantumState back = evolved(s1, p, orbit, 0.0);
    CHECK(fidelity(back, s0) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("split operator and Crank-Nicolson agree") {
    const SystemParams p{0.5, 0.1, 0.05, 1e-3};
    const OrbitSolution orbit = build_orbit_table({0.1, 4096});
    const QuantumState s0 = init_quantum_state({10.0, 0.5, 0.0}, p, default_cutoff(p.beta));
    EvolutionControls cn;
    cn.method = QuantumMethod::crank_nicolson;
    cn.dtau = 1e-5;
    const QuantumState a = evolved(s0, p, orbit, 0.5);
    const QuantumState b = evolved(s0, p, orbit, 0.5, cn);
    CHECK(expectation_jz(a) == doctest::Approx(expectation_jz(b)).epsilon(1e-5));
    CHECK(fidelity(a, b) > 1.0 - 1e-6);
}

TEST_CASE("noise-free dynamics keep odd levels empty") {
    const SystemParams p{0.5, 0.1, 0.05, 1e-3};
    const OrbitSolution orbit = build_orbit_table({0.1, 4096});
    const int K = default_cutoff(p.beta);
    QuantumState s = init_quantum_state({10.0, 0.5, 0.0}, p, K);
    for (int m = -K; m <= K; ++m) {
        if (m % 2 != 0) {
            s.at(m) = 0.0;
        }
    }
    const double n = std::sqrt(s.norm_squared());
    for (auto& c : s.c) {
        c /= n;
    }
    s = evolved(s, p, orbit, 3.0);
    for (int m = -K; m <= K; ++m) {
        if (m % 2 != 0) {
            CHECK(s.at(m) == cplx(0.0, 0.0));
        }
    }
}

TEST_CASE("probability vector sums to one") {
    const SystemParams p{0.5, 0.1, 0.05, 1e-3};
    const QuantumState s = init_quantum_state({10.0, 0.5, 0.0}, p, 416);
    const auto pr = probability_vector(s);
    double sum = 0.0;
    for (double x : pr) {
        sum += x;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("too small a basis is reported") {
    const SystemParams p{0.5, 0.1, 0.05, 1e-3};
    CHECK_THROWS_AS(init_quantum_state({10.0, 0.5, 0.0}, p, 150), NumericalError);
    const OrbitSolution orbit = build_orbit_table({0.1, 1024});
    QuantumState s = init_quantum_state({10.0, 0.5, 0.0}, p, 300);
    CHECK_THROWS_AS(evolved(s, p, orbit, 3.0), NumericalError);
}
