#pragma once

#include <cstdint>
#include <random>

namespace cosime {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; used to derive independent child seeds.
constexpr std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed for stream `index` under `master`. Distinct indices give distinct seeds.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    return mix_seed(mix_seed(master) ^ (index * 0xd1b54a32d192ed03ULL + 1));
}

/// Standard normal draw truncated to |z| <= limit by resampling.
inline double truncated_normal(Rng& rng, double limit = 4.0) {
    std::normal_distribution<double> n01(0.0, 1.0);
    for (;;) {
        const double z = n01(rng);
        if (z >= -limit && z <= limit) return z;
    }
}

}  // namespace cosime
