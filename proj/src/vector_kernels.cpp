// Built with vector math flags when HYPERION_VECTOR_KERNEL is on; keep this
// file free of NaN/Inf tests (they may be folded away under -ffast-math).
#include "vector_kernels.hpp"

#include <cmath>

namespace hyperion::detail {

namespace {

constexpr std::size_t W = kernel_width;

template <bool WithNoise>
void advance_block(double (&p)[W], double (&j)[W], std::span<const StageDrive> drives, double h,
                   double noise_amp, double harmonic) {
    const std::size_t steps = drives.size() / 2;
    const double half = 0.5 * h;
    const double sixth = h / 6.0;
    double k1p[W], k1j[W], k2p[W], k2j[W], k3p[W], k3j[W], k4j[W], q[W];

    for (std::size_t s = 0; s < steps; ++s) {
        const StageDrive d0 = drives[2 * s];
        const StageDrive d1 = drives[2 * s + 1];
        const StageDrive d2 = drives[2 * s + 2];

#pragma omp simd
        for (std::size_t l = 0; l < W; ++l) {
            k1p[l] = j[l];
            k1j[l] = -d0.coef * std::sin(2.0 * p[l] - d0.two_theta);
            if constexpr (WithNoise) {
                k1j[l] += noise_amp * std::sin(harmonic * p[l]);
            }
            q[l] = p[l] + half * k1p[l];
            k2p[l] = j[l] + half * k1j[l];
        }
#pragma omp simd
        for (std::size_t l = 0; l < W; ++l) {
            k2j[l] = -d1.coef * std::sin(2.0 * q[l] - d1.two_theta);
            if constexpr (WithNoise) {
                k2j[l] += noise_amp * std::sin(harmonic * q[l]);
            }
            q[l] = p[l] + half * k2p[l];
            k3p[l] = j[l] + half * k2j[l];
        }
#pragma omp simd
        for (std::size_t l = 0; l < W; ++l) {
            k3j[l] = -d1.coef * std::sin(2.0 * q[l] - d1.two_theta);
            if constexpr (WithNoise) {
                k3j[l] += noise_amp * std::sin(harmonic * q[l]);
            }
            q[l] = p[l] + h * k3p[l];
        }
#pragma omp simd
        for (std::size_t l = 0; l < W; ++l) {
            const double k4p = j[l] + h * k3j[l];
            k4j[l] = -d2.coef * std::sin(2.0 * q[l] - d2.two_theta);
            if constexpr (WithNoise) {
                k4j[l] += noise_amp * std::sin(harmonic * q[l]);
            }
            p[l] += sixth * (k1p[l] + 2.0 * k2p[l] + 2.0 * k3p[l] + k4p);
            j[l] += sixth * (k1j[l] + 2.0 * k2j[l] + 2.0 * k3j[l] + k4j[l]);
        }
    }
}

}  // namespace

void rk4_advance(double* phi, double* jz, std::size_t count, std::span<const StageDrive> drives,
                 double h, double noise_amp, int harmonic) {
    const double harm = static_cast<double>(harmonic);
    for (std::size_t base = 0; base < count; base += W) {
        const std::size_t len = count - base < W ? count - base : W;
        double p[W] = {};
        double j[W] = {};
        for (std::size_t l = 0; l < len; ++l) {
            p[l] = phi[base + l];
            j[l] = jz[base + l];
        }
        if (noise_amp != 0.0) {
            advance_block<true>(p, j, drives, h, noise_amp, harm);
        } else {
            advance_block<false>(p, j, drives, h, noise_amp, harm);
        }
        for (std::size_t l = 0; l < len; ++l) {
            phi[base + l] = p[l];
            jz[base + l] = j[l];
        }
    }
}

void unit_phases(const double* angle, double* out, std::size_t count) {
    for (std::size_t base = 0; base < count; base += W) {
        const std::size_t len = count - base < W ? count - base : W;
        double a[W] = {};
        double cs[W], sn[W];
        for (std::size_t l = 0; l < len; ++l) {
            a[l] = angle[base + l];
        }
#pragma omp simd
        for (std::size_t l = 0; l < W; ++l) {
            cs[l] = std::cos(a[l]);
            sn[l] = std::sin(a[l]);
        }
        for (std::size_t l = 0; l < len; ++l) {
            out[2 * (base + l)] = cs[l];
            out[2 * (base + l) + 1] = sn[l];
        }
    }
}

}  // namespace hyperion::detail
