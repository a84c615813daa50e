#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hyperion/config.hpp"

namespace hyperion {

/// One measured quantity against its threshold.
struct Check {
    std::string label;
    double value = 0.0;
    std::string target;
    bool pass = false;
};

struct CriterionResult {
    std::string id;
    std::vector<Check> checks;
    std::string note;

    bool pass() const;
    /// "P5 PASS|FAIL label=value (target); ..." on one line.
    std::string line() const;
};

// Thresholds. Each criterion reads the summary JSON of the preset bundle(s)
// named in its argument list.
namespace threshold {
inline constexpr double norm_drift = 1e-9;
inline constexpr double energy_drift = 1e-8;
inline constexpr double lyapunov = 0.85, lyapunov_tol = 0.1;
inline constexpr double early_slope = 2.0, early_slope_tol = 0.15;
inline constexpr double error_fraction = 0.1;        ///< ensemble error / measured difference
inline constexpr double growth_rate = 2.9, growth_rate_tol = 0.3;
inline constexpr double growth_beta = 0.003;         ///< chaotic_growth item the rate is read from
inline constexpr double growth_error_fraction = 0.1; ///< classical error / envelope in the window
inline constexpr double growth_stop_ratio = 3.0;     ///< peak [6,12] / peak [3,6]
inline constexpr double saturation_jz = 8.2, saturation_jz_tol = 0.3;
inline constexpr double saturation_slope = 2.0 / 3.0, saturation_slope_tol = 0.10;
inline constexpr int saturation_min_betas = 4;
inline constexpr double unsmoothed_norm = 0.5;
inline constexpr double smoothing_reduction = 5.0;
inline constexpr double smoothing_delta = 0.25;
inline constexpr double autocov_z = 3.0;
inline constexpr double diffusion_rel = 0.10;
inline constexpr double collapse_slope = 1.0 / 6.0, collapse_slope_tol = 0.05;
inline constexpr int collapse_min_points = 9;
inline constexpr double decay_time = 5.6, decay_time_tol = 0.8;
inline constexpr double smoothing_slope = 0.44, smoothing_slope_tol = 0.07;
inline constexpr double smoothing_prefactor = 0.58, smoothing_prefactor_tol = 0.15;
}  // namespace threshold

CriterionResult check_unitarity(const json& unitarity);                               // P1
CriterionResult check_first_integral(const json& first_integral);                     // P2
CriterionResult check_lyapunov(const json& lyapunov);                                 // P3
CriterionResult check_early_scaling(const json& regular_means, const json& chaotic_early);  // P4
/// Rate from chaotic_growth, stop and saturation from chaotic_means (either may be null).
/// `lambda` from the lyapunov bundle; the rate > 2 lambda check is skipped without it.
CriterionResult check_growth_saturation(const json& chaotic_growth, const json& chaotic_means,
                                        std::optional<double> lambda);  // P5
CriterionResult check_saturation_scaling(const json& chaotic_means);                  // P6
CriterionResult check_unsmoothed_norm(const json& distributions);                     // P7
CriterionResult check_noise(const json& noise_check);                                 // P8
/// `classical_decay` may be null; the ensemble-convergence check is then skipped.
CriterionResult check_collapse(const json& decoherence, const json& classical_decay); // P9
CriterionResult check_smoothing_scaling(const json& distributions);                   // P10
CriterionResult check_hyperion(const json& hyperion_report);                          // P11

/// Criteria computable from one bundle, chosen by its preset name.
std::vector<CriterionResult> bundle_criteria(const std::string& preset, const json& summary);

}  // namespace hyperion
