#include "hyperion/schedule.hpp"

#include <algorithm>
#include <cmath>

#include "hyperion/environment.hpp"
#include "hyperion/errors.hpp"

namespace hyperion {

namespace {
// Record times closer than this to a boundary are merged with it.
constexpr double merge_tol = 1e-12;
}  // namespace

std::vector<Segment> build_schedule(double start, double end, double max_step,
                                    std::span<const double> record_at,
                                    const NoiseRealization* noise) {
    if (!(max_step > 0.0)) {
        throw ConfigError("integrator step must be positive");
    }
    const double dir = end >= start ? 1.0 : -1.0;
    for (std::size_t i = 0; i < record_at.size(); ++i) {
        const double t = record_at[i];
        if ((t - start) * dir < -merge_tol || (end - t) * dir < -merge_tol) {
            throw ConfigError("record time outside the integration interval");
        }
        if (i > 0 && (t - record_at[i - 1]) * dir < 0.0) {
            throw ConfigError("record times must be ordered along the integration direction");
        }
    }

    struct Mark {
        double t;
        bool record;
    };
    std::vector<Mark> marks;
    marks.reserve(record_at.size() + 2);
    for (double t : record_at) {
        marks.push_back({t, true});
    }
    marks.push_back({end, false});
    if (noise != nullptr) {
        const double lo = std::min(start, end);
        const double hi = std::max(start, end);
        if (hi > noise->span() + merge_tol) {
            throw ConfigError("noise realization does not cover the integration interval");
        }
        for (double b : noise->boundaries_between(lo, hi)) {
            marks.push_back({b, false});
        }
    }
    std::stable_sort(marks.begin(), marks.end(),
                     [dir](const Mark& a, const Mark& b) { return a.t * dir < b.t * dir; });

    std::vector<Segment> segments;
    double t = start;
    for (const Mark& m : marks) {
        if (std::abs(m.t - t) <= merge_tol) {
            // Zero-length: attach the record flag to the previous segment.
            if (m.record) {
                if (!segments.empty() && std::abs(segments.back().t1 - m.t) <= merge_tol) {
                    segments.back().record = true;
                } else {
                    segments.push_back({t, t, 0, true});
                }
            }
            continue;
        }
        const double len = std::abs(m.t - t);
        const int steps = std::max(1, static_cast<int>(std::ceil(len / max_step - 1e-9)));
        segments.push_back({t, m.t, steps, m.record});
        t = m.t;
    }
    return segments;
}

}  // namespace hyperion
