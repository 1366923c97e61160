#pragma once

// Counter-based deterministic RNG: each (seed, index) pair derives its own
// splitmix64 stream, so sampling is order-independent, parallelizable and
// bit-identical across platforms (no standard-library distributions).

#include <cstdint>

namespace rbox {

class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t index)
        : state_(mix(mix(seed + 0x9E3779B97F4A7C15ull) ^ mix(index + 0xD1B54A32D192ED03ull))) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ull;
        return mix(state_);
    }

    /// Uniform double in [0, 1) from the top 53 bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    std::uint64_t state_;
};

}  // namespace rbox
