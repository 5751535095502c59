#pragma once

#include <cstdint>
#include <initializer_list>
#include <string_view>

namespace stegcost {

/// Identifier of the per-pixel generator; recorded in embedding metadata so
/// patterns stay reproducible across releases.
inline constexpr std::string_view kPixelRngId = "stegcost-splitmix64-v1";

/// SplitMix64 finalizer. Bijective on 64-bit words, strong avalanche.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
}

/// Keyed hash of a pixel coordinate. Pure function of (seed, row, col), so
/// sampling is schedule-independent no matter how pixels are partitioned
/// across workers.
constexpr std::uint64_t pixel_key(std::uint64_t seed, std::uint64_t row, std::uint64_t col) noexcept {
    std::uint64_t h = mix64(seed + 0x9E3779B97F4A7C15ULL);
    h = mix64(h ^ (row + 0xBF58476D1CE4E5B9ULL));
    h = mix64(h ^ (col + 0x94D049BB133111EBULL));
    return h;
}

/// Folds a list of tags into a seed, for deriving independent sub-seeds
/// (per cover, per configuration, ...) from one user-facing seed.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> tags) noexcept {
    std::uint64_t h = mix64(seed + 0x9E3779B97F4A7C15ULL);
    for (std::uint64_t t : tags) h = mix64(h ^ (t + 0x9E3779B97F4A7C15ULL));
    return h;
}

/// Uniform double in [0, 1) from 64 random bits (53-bit mantissa grid).
constexpr double unit_double(std::uint64_t bits) noexcept {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Sequential SplitMix64 stream for shuffles and synthetic noise.
class SplitMix64 {
public:
    explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    constexpr std::uint64_t next() noexcept {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix64(state_);
    }

    constexpr double next_unit() noexcept { return unit_double(next()); }

    /// Unbiased integer in [0, bound). bound must be > 0.
    std::uint64_t next_below(std::uint64_t bound) noexcept {
        std::uint64_t x = next();
        __uint128_t m = static_cast<__uint128_t>(x) * bound;
        auto low = static_cast<std::uint64_t>(m);
        if (low < bound) {
            std::uint64_t threshold = (0 - bound) % bound;
            while (low < threshold) {
                x = next();
                m = static_cast<__uint128_t>(x) * bound;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

private:
    std::uint64_t state_;
};

}  // namespace stegcost
