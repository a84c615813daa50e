#pragma once

#include <cstddef>
#include <span>

namespace hyperion::detail {

/// Tidal drive at one stage time: coef = 6 pi^2 alpha (a/r)^3, two_theta = 2 theta.
struct StageDrive {
    double coef;
    double two_theta;
};

inline constexpr std::size_t kernel_width = 8;

/// RK4-advances trajectories [0, count) through drives.size() / 2 substeps of
/// length h. drives holds 2 * steps + 1 entries at t0, t0 + h/2, t0 + h, ...
/// The noise torque noise_amp * sin(harmonic * phi) is constant over the call.
/// Every trajectory takes the same vector code path regardless of its
/// position, so results do not depend on how callers partition the range.
void rk4_advance(double* phi, double* jz, std::size_t count, std::span<const StageDrive> drives,
                 double h, double noise_amp, int harmonic);

/// out[2i] = cos(angle[i]), out[2i+1] = sin(angle[i]) (interleaved complex).
void unit_phases(const double* angle, double* out, std::size_t count);

}  // namespace hyperion::detail
