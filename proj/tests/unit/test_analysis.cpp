#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "hyperion/analysis.hpp"
#include "hyperion/errors.hpp"

using namespace hyperion;

TEST_CASE("one-norm of disjoint and equal distributions") {
    const std::vector<double> a = {0.5, 0.5, 0.0, 0.0};
    const std::vector<double> b = {0.0, 0.0, 0.5, 0.5};
    CHECK(one_norm(a, b) == doctest::Approx(2.0));
    CHECK(one_norm(a, a) == 0.0);
}

TEST_CASE("triangular smoothing keeps probability and flattens structure") {
    std::vector<double> p(201, 0.0);
    for (std::size_t i = 0; i < p.size(); i += 2) {
        p[i] = 1.0;
    }
    const double total = std::accumulate(p.begin(), p.end(), 0.0);
    for (auto& x : p) {
        x /= total;
    }
    const auto s = triangular_smooth(p, 0.05, 0.5);
    CHECK(std::accumulate(s.begin(), s.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-13));
    // a half-width of an even number of bins flattens the comb exactly away from the edges
    CHECK(s[100] == doctest::Approx(s[101]).epsilon(1e-12));
    // a half-width of one bin changes nothing
    const auto same = triangular_smooth(p, 0.05, 0.05);
    CHECK(one_norm(same, p) < 1e-14);
}

TEST_CASE("power-law fit recovers exact exponents") {
    const std::vector<double> x = {0.0125, 0.025, 0.05, 0.1};
    std::vector<double> y;
    for (double v : x) {
        y.push_back(3.0 * std::pow(v, 2.0 / 3.0));
    }
    const ScalingFit f = fit_power_law(x, y);
    CHECK(f.exponent == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(f.prefactor == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(f.r_squared == doctest::Approx(1.0));
    const std::vector<double> two = {1.0, 2.0};
    CHECK_THROWS_AS(fit_power_law(two, two), AnalysisError);
}

TEST_CASE("exponential fit over a window") {
    std::vector<double> t, y;
    for (int i = 0; i <= 100; ++i) {
        t.push_back(0.1 * i);
        y.push_back(0.01 * std::exp(2.9 * t.back()));
    }
    const ExponentialFit f = fit_exponential(t, y, 2.0, 5.5);
    CHECK(f.rate == doctest::Approx(2.9).epsilon(1e-10));
    CHECK(f.points == 36);
}

TEST_CASE("decay fit recovers time constant and floor") {
    std::vector<double> t, y;
    for (int i = 0; i <= 300; ++i) {
        t.push_back(0.1 * i);
        const double rise = t.back() < 3.0 ? t.back() / 3.0 : 1.0;
        y.push_back(t.back() < 3.0 ? 0.6 * rise : 0.05 + 0.55 * std::exp(-(t.back() - 3.0) / 5.6));
    }
    const DecayFit f = fit_decay_time(t, y);
    CHECK(f.decaying);
    CHECK(f.tau_d == doctest::Approx(5.6).epsilon(1e-4));
    CHECK(f.floor == doctest::Approx(0.05).epsilon(1e-4));
    CHECK(f.tau_start == doctest::Approx(3.0));
}

TEST_CASE("peaks, envelopes and time averages") {
    const std::vector<double> t = {0.0, 0.5, 1.0, 1.5, 2.0, 2.5};
    const std::vector<double> y = {0.1, -0.4, 0.2, 0.3, -0.1, 0.05};
    const Peak p = peak_abs(t, y, 0.0, 2.5);
    CHECK(p.value == doctest::Approx(0.4));
    CHECK(p.tau == doctest::Approx(0.5));
    CHECK(peak_abs(t, y, 1.0, 2.0).value == doctest::Approx(0.3));
    CHECK_THROWS(peak_abs(t, y, 3.0, 4.0));
    const Envelope e = envelope(t, y, 1.0);
    REQUIRE(e.value.size() == 3);
    CHECK(e.value[0] == doctest::Approx(0.4));
    CHECK(e.value[1] == doctest::Approx(0.3));
    CHECK(e.tau[1] == doctest::Approx(1.5));
    CHECK(time_average(t, y, 1.0, 2.0) == doctest::Approx((0.2 + 0.3 - 0.1) / 3.0));
}

TEST_CASE("one-norm floor predicts the sampling error of a histogram") {
    const std::vector<double> p = {0.1, 0.2, 0.3, 0.25, 0.15};
    const std::size_t n = 2000;
    std::mt19937_64 rng(1);
    std::discrete_distribution<int> pick(p.begin(), p.end());
    double mean = 0.0;
    const int trials = 400;
    for (int k = 0; k < trials; ++k) {
        std::vector<double> h(p.size(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            h[static_cast<std::size_t>(pick(rng))] += 1.0 / n;
        }
        mean += one_norm(h, p) / trials;
    }
    CHECK(mean == doctest::Approx(one_norm_floor(p, n)).epsilon(0.05));
}

TEST_CASE("sigma_m and collapse parameter") {
    CHECK(sigma_m(2.0, 400) == doctest::Approx(0.1));
    CHECK(collapse_parameter(0.05, 1e-4) == doctest::Approx(25.0));
}
