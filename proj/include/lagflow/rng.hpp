#pragma once

#include <cstdint>

namespace lagflow {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Counter-based 64-bit generator.
///
///   key    = mix64(seed ^ mix64(stream ^ 0xD1B54A32D192ED03))
///   out(k) = mix64(key + (k + 1) * 0x9E3779B97F4A7C15)      k = 0, 1, 2, ...
///
/// Uniforms use the top 53 bits: (out >> 11) + 0.5, scaled by 2^-53, so they lie
/// strictly inside (0, 1). Normal variates use the Box-Muller cosine branch on
/// two consecutive uniforms: sqrt(-2 ln u1) * cos(2 pi u2).
///
/// A (seed, stream) pair fixes the whole sequence, so independent trials take
/// their trial index as stream and can run in any order.
class CounterRng {
public:
    static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
    static constexpr std::uint64_t kStreamSalt = 0xD1B54A32D192ED03ULL;

    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
        : key_(mix64(seed ^ mix64(stream ^ kStreamSalt))) {}

    std::uint64_t next_u64() { return mix64(key_ + (++counter_) * kGolden); }
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double normal();

    std::uint64_t counter() const { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

} // namespace lagflow
