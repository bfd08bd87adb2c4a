#pragma once
// Counter-based pseudo-random generator (SplitMix64).
//
// Output i of a stream seeded with s is mix(s + (i+1)*0x9E3779B97F4A7C15)
// where mix is the SplitMix64 finalizer; any implementation of that
// formula reproduces the streams bit for bit.  Substream j of a stream is
// the stream seeded with mix(s ^ mix(j + 0x632BE59BD9B4E019)).

#include <cstdint>

namespace ccb {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed) {}

    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    std::uint64_t next_u64() {
        return mix(seed_ + 0x9E3779B97F4A7C15ull * ++counter_);
    }

    // Uniform on [0,1) with 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Unbiased integer in [0, n) via rejection.
    std::uint64_t uniform_int(std::uint64_t n) {
        const std::uint64_t limit = ~0ull - ~0ull % n;
        std::uint64_t v;
        do { v = next_u64(); } while (v >= limit);
        return v % n;
    }

    // Independent stream for realization `index`; does not consume state.
    Rng substream(std::uint64_t index) const {
        return Rng(mix(seed_ ^ mix(index + 0x632BE59BD9B4E019ull)));
    }

private:
    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
};

}  // namespace ccb
