#ifndef CPOFDM_RNG_HPP
#define CPOFDM_RNG_HPP

#include <cstdint>
#include <initializer_list>
#include <random>

namespace cpofdm {

using Seed = std::uint64_t;
using Rng = std::mt19937_64;

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Stable hash of an ordered tuple of integers.
constexpr Seed derive_seed(std::initializer_list<std::uint64_t> parts) noexcept {
    std::uint64_t h = 0x6A09E667F3BCC909ULL;
    for (auto p : parts) h = mix64(h ^ mix64(p));
    return h;
}

// Tags separating the independent streams of one trial.
enum class Stream : std::uint64_t { data = 1, channel = 2, noise = 3 };

constexpr Seed stream_seed(Seed base, Stream s) noexcept {
    return derive_seed({base, static_cast<std::uint64_t>(s)});
}

} // namespace cpofdm

#endif // CPOFDM_RNG_HPP
