#pragma once

// Deterministic random streams. Every sampling site derives its own stream
// from the run seed and a stable identity (relation, length, walk index, or
// a rule hash), so results do not depend on worker scheduling.

#include <cassert>
#include <cstdint>
#include <random>
#include <span>

namespace chronorule {

using Rng = std::mt19937_64;

// splitmix64 finalizer; good avalanche for cheap seed derivation.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                                 std::uint64_t c = 0, std::uint64_t d = 0) {
    std::uint64_t h = mix64(seed ^ 0x243f6a8885a308d3ull);
    h = mix64(h ^ a);
    h = mix64(h ^ b);
    h = mix64(h ^ c);
    h = mix64(h ^ d);
    return h;
}

// Unbiased draw from [0, n) via rejection.
inline std::size_t uniform_index(Rng& rng, std::size_t n) {
    assert(n > 0);
    const std::uint64_t bound = n;
    const std::uint64_t threshold = (0ull - bound) % bound;
    for (;;) {
        const std::uint64_t r = rng();
        if (r >= threshold) return static_cast<std::size_t>(r % bound);
    }
}

// Uniform double in [0, 1) with 53 random bits.
inline double uniform_unit(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Draw an index proportionally to the given non-negative weights.
inline std::size_t weighted_index(Rng& rng, std::span<const double> weights) {
    assert(!weights.empty());
    double total = 0.0;
    for (double w : weights) total += w;
    const double u = uniform_unit(rng) * total;
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
        acc += weights[i];
        if (u < acc) return i;
    }
    return weights.size() - 1;
}

}  // namespace chronorule
