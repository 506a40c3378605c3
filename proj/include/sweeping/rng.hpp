#pragma once

#include <cmath>
#include <cstdint>

namespace sweeping::rng {

/// splitmix64 finalizer. Counter-based randomness throughout: every variate
/// is a pure function of (seed, stream, index), so Monte Carlo results do not
/// depend on scheduling or evaluation order.
inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline constexpr std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    return splitmix64(a ^ (0x9e3779b97f4a7c15ULL + b + (a << 6) + (a >> 2)));
}

inline constexpr std::uint64_t key(std::uint64_t seed, std::uint64_t stream,
                                   std::uint64_t index) {
    return mix(mix(seed, stream), index);
}

/// Uniform in the open interval (0, 1): 53 mantissa bits, offset by half an ulp
/// so 0 is never produced (log-safe).
inline double uniform01(std::uint64_t k) {
    return static_cast<double>((splitmix64(k) >> 11) + 0.5) * 0x1.0p-53;
}

/// Standard normal variate keyed by (seed, stream, index), via Box-Muller on
/// two decorrelated uniforms.
inline double normal(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    const std::uint64_t k = key(seed, stream, index);
    const double u1 = uniform01(k);
    const double u2 = uniform01(splitmix64(k ^ 0xd1342543de82ef95ULL));
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
}

/// Splittable sub-seed for path index i under a master seed. Sub-streams are
/// statistically independent of each other and of the master stream.
inline constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    return mix(splitmix64(master), 0x632be59bd9b4e019ULL + index);
}

/// Uniform in [lo, hi) keyed by k.
inline double uniform(std::uint64_t k, double lo, double hi) {
    return lo + uniform01(k) * (hi - lo);
}

} // namespace sweeping::rng
