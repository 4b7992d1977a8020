#pragma once

#include <cmath>
#include <cstdint>

namespace txnforge {

// Deterministic random number generation.
//
// Every stochastic component in this project draws from the same pinned
// generator family so that a (config, seed) pair fully determines all
// outputs, independent of platform or standard-library internals:
//
//   * stream seeds are derived with the SplitMix64 finalizer (mix_seed),
//   * draws come from xoshiro256** seeded via SplitMix64,
//   * uniform doubles use the top 53 bits, bounded integers use modulo
//     with rejection of the low region, and normal deviates use
//     Box-Muller consuming exactly two words per call.
//
// std::mt19937 / std::normal_distribution are avoided on purpose: their
// draw sequences are not pinned by this project.

/// SplitMix64 finalizer over `master` and a stream index. Bijective in
/// `stream` for fixed `master`, so distinct streams never collide.
inline std::uint64_t mix_seed(std::uint64_t master, std::uint64_t stream) {
    std::uint64_t z = master ^ (0x9E3779B97F4A7C15ULL * (stream + 1));
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// xoshiro256** (Blackman & Vigna), state expanded from a 64-bit seed
/// with SplitMix64.
class Rng64 {
  public:
    explicit Rng64(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : state_) {
            sm += 0x9E3779B97F4A7C15ULL;
            std::uint64_t z = sm;
            z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
            z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
            word = z ^ (z >> 31);
        }
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1), 53-bit resolution.
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, n). Modulo with rejection of the low
    /// region (r < 2^64 mod n), so the result is unbiased.
    std::uint64_t uniform_below(std::uint64_t n) {
        const std::uint64_t threshold = (0ULL - n) % n;
        std::uint64_t r;
        do {
            r = next_u64();
        } while (r < threshold);
        return r % n;
    }

    /// Standard normal deviate via Box-Muller. Consumes exactly two
    /// words per call; u1 lies in (0, 1] so the log is finite.
    double gaussian() {
        const double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
        const double u2 = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
        constexpr double two_pi = 6.283185307179586476925286766559;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
    }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t state_[4];
};

} // namespace txnforge
