#pragma once

#include <cstdint>

namespace urnsim {

// SplitMix64: 64-bit additive-counter generator with a murmur-style
// finalizer. Small state, no warm-up, and every replication gets its own
// stream via split_seed, so parallel runs stay reproducible. This generator
// is part of the output contract: golden tests freeze its exact sequence.
struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t x = (state += 0x9E3779B97F4A7C15ULL);
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
        return x ^ (x >> 31);
    }

    // Uniform on [0,1), 53 significant bits.
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

// Seed for replication r: base ^ (r+1)*golden-gamma, pushed through the
// SplitMix64 finalizer. Streams are independent of execution order.
inline std::uint64_t split_seed(std::uint64_t base, std::uint64_t r) {
    std::uint64_t x = base ^ ((r + 1) * 0x9E3779B97F4A7C15ULL);
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

} // namespace urnsim
