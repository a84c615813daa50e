#include <doctest.h>

#include <cmath>

#include "hyperion/environment.hpp"
#include "hyperion/errors.hpp"

using namespace hyperion;

TEST_CASE("correlated sequence autocovariance follows c^k within Bartlett errors") {
    const double c = 0.5;
    const std::size_t n = 400000;
    const auto x = correlated_sequence(c, n, 99);
    const auto acov = autocovariance(x, 6);
    const double v = stationary_variance(c);
    CHECK(v == doctest::Approx(1.0 / 3.0));
    for (std::size_t k = 0; k < acov.size(); ++k) {
        // Bartlett: n Var(gamma_k) = sum_j gamma_j^2 + gamma_{j+k} gamma_{j-k}
        double s = 0.0;
        for (int j = -60; j <= 60; ++j) {
            auto g = [&](int l) { return v * std::pow(c, std::abs(l)); };
            s += g(j) * g(j) + g(j + static_cast<int>(k)) * g(j - static_cast<int>(k));
        }
        const double se = std::sqrt(s / n);
        CHECK(std::abs(acov[k] - v * std::pow(c, k)) < 4.0 * se);
    }
}

TEST_CASE("update interval and diffusion parameter") {
    NoiseParams np;
    np.sigma = 0.3;
    np.tau_c = 0.01;
    np.c = 0.5;
    CHECK(np.update_interval() == doctest::Approx(0.01 * std::log(2.0)));
    CHECK(diffusion_parameter(np) == doctest::Approx(0.09 * 0.01 / 6.0));
}

TEST_CASE("empirical diffusion matches the formula") {
    NoiseParams np;
    np.sigma = 0.25;
    np.tau_c = 0.01;
    np.c = 0.5;
    const DiffusionEstimate d = empirical_diffusion(np, 20000, 2.0, 5);
    CHECK(d.sufficient);
    // the formula is within 10%; the exact value for piecewise-constant
    // AR(1) updates is sigma^2 h / 4 with h = tau_c ln 2
    CHECK(std::abs(d.d_hat / diffusion_parameter(np) - 1.0) < 0.10);
    const double exact = np.sigma * np.sigma * np.update_interval() / 4.0;
    CHECK(std::abs(d.d_hat - exact) < 5.0 * d.std_error);
}

TEST_CASE("noise realization is piecewise constant and bounded in time") {
    NoiseParams np;
    np.sigma = 0.25;
    np.tau_c = 0.01;
    np.seed = 3;
    const NoiseRealization r = make_noise_realization(np, 1.0, 1e-3);
    const double h = r.update_interval();
    CHECK(r.span() >= 1.0);
    CHECK(r.value_at(0.5 * h) == r.values()[0]);
    CHECK(r.value_at(2.5 * h) == r.values()[2]);
    CHECK(r.amplitude_at(2.5 * h) == doctest::Approx(0.25 * r.values()[2]));
    CHECK_THROWS_AS(r.value_at(r.span() + h), ConfigError);
    CHECK_THROWS_AS(make_noise_realization(np, 1.0, 0.01), ConfigError);
    // the same seed gives the same sequence
    const NoiseRealization again = make_noise_realization(np, 1.0, 1e-3);
    CHECK(std::equal(r.values().begin(), r.values().end(), again.values().begin()));
}

TEST_CASE("noise parameters are validated") {
    NoiseParams np;
    np.c = 1.0;
    CHECK_THROWS_AS(np.validate(), ConfigError);
    np.c = 0.5;
    np.tau_c = 0.0;
    CHECK_THROWS_AS(np.validate(), ConfigError);
}
