#pragma once

#include <string>

#include "hyperion/config.hpp"
#include "hyperion/hyperion_params.hpp"

namespace hyperion {

/// Prefactors of the two scaling laws used to extrapolate to Hyperion,
/// measured at desk scale.
struct ScalingCalibration {
    double jz_prefactor = 8.97;   ///< max |<Jz> difference| = C beta^(2/3)
    double norm_prefactor = 0.41; ///< max |qm - cl|_1 = C (beta^2 / D)^(1/6)
    std::string source = "built-in (desk-scale fits)";
};

/// Physical parameters, derived dimensionless constants and extrapolated
/// QC differences. Every entry carries a value, a unit and a note on how it
/// was obtained.
json hyperion_report(const BodyParams& body, const DustParams& dust, const ScalingCalibration& cal);

/// Labeled text rendering of hyperion_report().
std::string format_hyperion_report(const json& report);

}  // namespace hyperion
