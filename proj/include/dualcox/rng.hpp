#pragma once

#include <cmath>
#include <cstdint>

namespace dualcox {

// SplitMix64 (Steele, Lea & Flood 2014; as published in Vigna's
// splitmix64.c). Counter-based: output i is mix64(seed + (i+1)*GAMMA), so
// streams are trivially reproducible in any language. All randomness in
// this project flows through this generator; the draw order of every
// consumer is documented at the call site.
class SplitMix64 {
  public:
    static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

    explicit SplitMix64(std::uint64_t seed = 1) : state_(seed) {}

    static std::uint64_t mix64(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::uint64_t next_u64() {
        state_ += kGamma;
        return mix64(state_);
    }

    // Uniform on [0,1) with 53 random bits; the zero value is bumped to
    // 2^-53 so that log(u) stays finite.
    double uniform01() {
        double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
        return u > 0.0 ? u : 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + uniform01() * (hi - lo); }

    bool bernoulli(double p) { return uniform01() < p; }

    // Box-Muller, non-caching: every call consumes exactly two uniforms.
    double normal() {
        double u1 = uniform01();
        double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
    }

    // Integer in [0, m); modulo bias is < m/2^64 and irrelevant here.
    std::uint64_t next_below(std::uint64_t m) { return next_u64() % m; }

  private:
    std::uint64_t state_;
};

// Substream r of a base seed is seeded with the (r+1)-th output of a
// SplitMix64 stream over the base seed. Replicates, restarts, and any other
// independent units each own one substream.
inline std::uint64_t substream_seed(std::uint64_t base_seed, std::uint64_t index) {
    return SplitMix64::mix64(base_seed + (index + 1) * SplitMix64::kGamma);
}

}  // namespace dualcox
