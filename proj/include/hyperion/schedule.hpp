#pragma once

#include <span>
#include <vector>

namespace hyperion {

class NoiseRealization;

/// One stretch of integration with equal substeps and a constant noise value.
struct Segment {
    double t0 = 0.0;
    double t1 = 0.0;
    int steps = 1;
    bool record = false;  ///< t1 is a requested record time
};

/// Splits [start, end] at record times and noise update boundaries into
/// segments of equal substeps no longer than max_step. Works in either time
/// direction; record times must lie between start and end and be ordered in
/// the direction of integration.
std::vector<Segment> build_schedule(double start, double end, double max_step,
                                    std::span<const double> record_at,
                                    const NoiseRealization* noise);

}  // namespace hyperion
