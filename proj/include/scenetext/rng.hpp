#pragma once

#include <array>
#include <cstdint>

namespace scenetext {

namespace detail {

// SplitMix64 output mix (Vigna). Used for seeding and counter-based splits.
inline uint64_t mix64(uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline uint64_t rotl64(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

} // namespace detail

/// xoshiro256++ with explicit, platform-independent sampling helpers.
/// All draws are pure integer/bit arithmetic so identical seeds give
/// byte-identical streams everywhere.
class Rng {
public:
    explicit Rng(uint64_t seed) {
        uint64_t z = seed;
        for (auto& s : state_) {
            z = detail::mix64(z);
            s = z;
        }
    }

    uint64_t next_u64() {
        const uint64_t result = detail::rotl64(state_[0] + state_[3], 23) + state_[0];
        const uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = detail::rotl64(state_[3], 45);
        return result;
    }

    /// Uniform in [0,1) with 53 random bits.
    double next_double() { return (next_u64() >> 11) * 0x1.0p-53; }

    /// Unbiased uniform integer in [0,n), n > 0 (rejection on the top range).
    uint64_t bounded(uint64_t n) {
        const uint64_t threshold = (0 - n) % n;
        for (;;) {
            uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

    double uniform(double a, double b) { return a + (b - a) * next_double(); }

private:
    std::array<uint64_t, 4> state_;
};

/// Counter-based per-sample seed derivation: workers processing disjoint
/// sample indices reproduce exactly what a sequential run would draw.
inline uint64_t derive_seed(uint64_t run_seed, uint64_t sample_index) {
    return detail::mix64(run_seed ^ detail::mix64(sample_index));
}

} // namespace scenetext
