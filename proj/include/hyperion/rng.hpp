#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace hyperion {

/// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Counter-based seed split: the seed of stream `index` depends only on
/// (master, domain, index), so adding streams never perturbs earlier ones.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t domain,
                                    std::uint64_t index) noexcept {
    return mix64(mix64(master ^ mix64(domain + 0x9e3779b97f4a7c15ULL)) + index);
}

/// Seed domains. Fixed values; changing them changes every stored result.
namespace seed_domain {
inline constexpr std::uint64_t trajectory = 1;
inline constexpr std::uint64_t realization = 2;
inline constexpr std::uint64_t noise = 3;
inline constexpr std::uint64_t sweep_point = 4;
inline constexpr std::uint64_t diffusion_walk = 5;
inline constexpr std::uint64_t classical_member = 6;
}  // namespace seed_domain

/// Counter-based generator (SplitMix64 stream). Output is fully specified,
/// so sequences are identical on every platform and standard library.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t key) noexcept : state_(key) {}

    std::uint64_t next_u64() noexcept {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix64(state_);
    }

    /// Uniform on the open interval (0, 1).
    double uniform() noexcept {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller; the second variate is cached.
    double normal() noexcept {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace hyperion
