#pragma once

#include <cstdint>

namespace nsl {

// SplitMix64 mixing step. Used both as a stand-alone generator and as the
// counter-based stream constructor: stream(master, i) seeds a generator with
// the i-th element of the SplitMix64 sequence started at `master`, so any
// sample index can be reached in O(1) and results never depend on which
// worker processed which index.
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ull;
        return mix64(state_);
    }

    // uniform in [0,1), 53-bit mantissa, platform independent
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // uniform in [0,n) by rejection; exact for any n >= 1
    std::uint64_t next_below(std::uint64_t n) {
        const std::uint64_t limit = n * (UINT64_MAX / n);
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return x % n;
    }

  private:
    std::uint64_t state_;
};

// Generator for the i-th per-sample stream of a master seed.
inline Rng stream(std::uint64_t master_seed, std::uint64_t index) {
    return Rng(mix64(master_seed + 0x9E3779B97F4A7C15ull * (index + 1)));
}

} // namespace nsl
