#include <doctest.h>

#include "hyperion/acceptance.hpp"

using namespace hyperion;

namespace {

json norm_item(double beta, double raw, double smoothed) {
    return {{"beta", beta},
            {"one_norm",
             {{{"tau", 40.0},
               {"value", raw},
               {"statistical_floor", 0.01},
               {"smoothed", {{{"delta_s", 0.25}, {"value", smoothed}}}}}}}};
}

}  // namespace

TEST_CASE("a criterion with no checks does not pass") {
    CriterionResult r{"P0", {}, ""};
    CHECK_FALSE(r.pass());
    CHECK(r.line().rfind("P0 FAIL", 0) == 0);
}

TEST_CASE("unsmoothed norm reads the reduction at the smallest beta") {
    json s = {{"items", {norm_item(0.05, 0.7, 0.3), norm_item(0.002, 0.74, 0.06)}}};
    const CriterionResult r = check_unsmoothed_norm(s);
    CHECK(r.pass());
    s["items"][1] = norm_item(0.002, 0.74, 0.2);
    CHECK_FALSE(check_unsmoothed_norm(s).pass());
    s["items"][1] = norm_item(0.002, 0.4, 0.01);
    CHECK_FALSE(check_unsmoothed_norm(s).pass());
    CHECK_FALSE(check_unsmoothed_norm(json::object()).pass());
}

TEST_CASE("growth check combines the growth and saturation bundles") {
    const json growth = {{"items",
                          {{{"beta", 0.008}, {"growth", {{"rate", 2.4}, {"error_fraction", 0.05}}}},
                           {{"beta", 0.003}, {"growth", {{"rate", 2.85}, {"error_fraction", 0.05}}}}}}};
    const json means = {
        {"items", {{{"beta", 0.05}, {"growth_stop", {{"ratio", 0.8}}}, {"saturation", {{"cl_mean", 8.1}}}}}}};
    CHECK(check_growth_saturation(growth, means, 0.9).pass());
    CHECK_FALSE(check_growth_saturation(growth, means, 1.5).pass());
    json noisy = growth;
    noisy["items"][1]["growth"]["error_fraction"] = 0.5;
    CHECK_FALSE(check_growth_saturation(noisy, means, std::nullopt).pass());
    CHECK(check_growth_saturation(json(), means, std::nullopt).pass());
}

TEST_CASE("missing values fail rather than pass") {
    CHECK_FALSE(check_unitarity(json::object()).pass());
    CHECK_FALSE(check_lyapunov(json::object()).pass());
    CHECK(check_unitarity({{"max_norm_drift", 1e-11}, {"max_odd_probability", 0.0}}).pass());
}
