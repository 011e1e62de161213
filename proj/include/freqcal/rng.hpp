#pragma once

#include <cstdint>
#include <random>

namespace freqcal {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer. Used to derive child seeds so that every
/// substream (model, start point, noise, order) is a pure function of the
/// parent seed and a tag.
constexpr std::uint64_t mix_seed(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t tag) noexcept {
    return mix_seed(mix_seed(parent) ^ (tag * 0xd1b54a32d192ed03ULL));
}

inline Rng make_rng(std::uint64_t seed) { return Rng{mix_seed(seed)}; }

// Uniform draw in [0, 1) consuming exactly one engine call. Keeping the
// consumption fixed makes scaled draws (min + u * (max - min)) line up
// across different ranges for the same seed.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(Rng& rng, double lo, double hi) {
    return lo + uniform01(rng) * (hi - lo);
}

// Substream tags.
namespace stream {
inline constexpr std::uint64_t model = 1;
inline constexpr std::uint64_t start = 2;
inline constexpr std::uint64_t noise = 3;
inline constexpr std::uint64_t order = 4;
inline constexpr std::uint64_t nonlocal = 5;
}  // namespace stream

}  // namespace freqcal
