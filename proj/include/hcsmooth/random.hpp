#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace hcsmooth {

using Rng = std::mt19937_64;

/// Uniform integer in [0, bound). Rejection sampling keeps the stream
/// identical across standard library implementations.
inline std::size_t uniform_index(Rng& rng, std::size_t bound) {
    const std::uint64_t range = bound;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % range;
    std::uint64_t draw = rng();
    while (draw >= limit) draw = rng();
    return static_cast<std::size_t>(draw % range);
}

/// SplitMix64 finalizer; derives independent child seeds from a parent seed.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace hcsmooth
