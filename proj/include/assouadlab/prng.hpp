#pragma once

#include <cstdint>

namespace assouadlab {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

/// The splitmix64 finalizer.
constexpr std::uint64_t splitmix64_mix(std::uint64_t z) {
    z = (z ^ (z >> 30U)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27U)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31U);
}

/// Output number `index` (0-based) of the splitmix64 stream seeded with `seed`.
/// Identical to calling next() index+1 times on a SplitMix64 with the same seed.
constexpr std::uint64_t splitmix64_at(std::uint64_t seed, std::uint64_t index) {
    return splitmix64_mix(seed + (index + 1) * kGolden);
}

class SplitMix64 {
public:
    explicit constexpr SplitMix64(std::uint64_t seed) : state_(seed) {}

    constexpr std::uint64_t next() {
        state_ += kGolden;
        return splitmix64_mix(state_);
    }

    // Uniform double in [0, 1) from the top 53 bits.
    double uniform() { return static_cast<double>(next() >> 11U) * 0x1.0p-53; }

private:
    std::uint64_t state_;
};

/// Order-independent draw keyed on (seed, level, key); used so that survival of a cube
/// does not depend on which thread or in which order it is expanded.
constexpr std::uint64_t keyed_draw(std::uint64_t seed, std::uint64_t level, std::uint64_t key) {
    std::uint64_t h = splitmix64_mix(seed ^ 0x6A09E667F3BCC909ULL);
    h = splitmix64_mix(h + (level + 1) * kGolden);
    return splitmix64_mix(h ^ (key * 0xD6E8FEB86659FD93ULL + kGolden));
}

} // namespace assouadlab
