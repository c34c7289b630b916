#pragma once

// Frozen deterministic noise generator. The stream is a pure function of
// (seed, index): a splitmix64-style finalizer over a Weyl counter produces
// uniforms in (0, 1], and Box-Muller maps consecutive pairs to standard
// normals. Changing any constant here invalidates published CSVs.

#include <cmath>
#include <cstdint>

#include "dsmreg/dense.hpp"

namespace dsmreg {

namespace detail {

constexpr std::uint64_t kWeylIncrement = 0x9E3779B97F4A7C15ULL;

inline std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
}

}  // namespace detail

/// k-th 64-bit word of the stream for `seed`.
inline std::uint64_t counter_u64(std::uint64_t seed, std::uint64_t k) {
    return detail::mix64(seed + (k + 1) * detail::kWeylIncrement);
}

/// Uniform deviate in (0, 1]; never 0, so log() below is safe.
inline double counter_uniform(std::uint64_t seed, std::uint64_t k) {
    return static_cast<double>((counter_u64(seed, k) >> 11) + 1) * 0x1.0p-53;
}

/// k-th standard normal deviate of the stream (Box-Muller over uniform pairs).
inline double counter_normal(std::uint64_t seed, std::uint64_t k) {
    const std::uint64_t pair = k / 2;
    const double u1 = counter_uniform(seed, 2 * pair);
    const double u2 = counter_uniform(seed, 2 * pair + 1);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    return (k % 2 == 0) ? r * std::cos(theta) : r * std::sin(theta);
}

inline Vector normal_vector(std::uint64_t seed, std::size_t n) {
    Vector e(n);
    for (std::size_t i = 0; i < n; ++i) e[i] = counter_normal(seed, i);
    return e;
}

}  // namespace dsmreg
