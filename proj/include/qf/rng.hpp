#pragma once

#include <cmath>
#include <cstdint>

#include "qf/normal.hpp"

namespace qf {

namespace detail {

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline std::uint64_t rotl64(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace detail

// Derives the seed of an independent substream.  The map is injective in
// index for a fixed parent seed, so replica / particle streams never collide
// by construction, and nesting (seed -> replica -> particle) is well defined.
inline std::uint64_t split_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t state = seed + 0x9E3779B97F4A7C15ull * (index + 1);
    detail::splitmix64_next(state);
    return detail::splitmix64_next(state);
}

// xoshiro256++ with splitmix64 state expansion.  Draw order is part of the
// reproducibility contract: with a fixed seed every stream yields the same
// sequence on every platform and under any worker count.
class RandomStream {
  public:
    explicit RandomStream(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& w : s_) w = detail::splitmix64_next(sm);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = detail::rotl64(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = detail::rotl64(s_[3], 45);
        return result;
    }

    // Uniform on [0,1), 53-bit resolution.
    double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform on (0,1]; never zero, safe under log().
    double uniform_open() { return double((next_u64() >> 11) + 1) * 0x1.0p-53; }

    // Standard normal via Box-Muller; consumes two uniforms per pair and
    // caches the sine draw, so consumption per stream is deterministic.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double r = std::sqrt(-2.0 * std::log(uniform_open()));
        const double a = two_pi * uniform();
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

  private:
    std::uint64_t s_[4];
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace qf
