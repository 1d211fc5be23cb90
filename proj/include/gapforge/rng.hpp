#pragma once

#include <cstdint>

namespace gapforge {

// SplitMix64. Small, fast, and stable across platforms, which matters more
// here than statistical heroics: every seeded run must be bit-reproducible
// regardless of thread count, so worker streams are derived from
// (seed, stream index) rather than shared.
class SplitMix64 {
public:
    explicit SplitMix64(uint64_t seed) : state_(seed) {}

    uint64_t next() {
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Unbiased integer in [0, bound) by rejection.
    uint64_t below(uint64_t bound) {
        uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            uint64_t r = next();
            if (r >= threshold) return r % bound;
        }
    }

    // Uniform double in [0, 1).
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
    uint64_t state_;
};

// Derives an independent stream seed from a base seed and a stream index.
// Used so that trial i of a Monte-Carlo run gets the same randomness no
// matter which thread executes it.
inline uint64_t derive_seed(uint64_t seed, uint64_t stream) {
    SplitMix64 mix(seed ^ (0x9e3779b97f4a7c15ULL * (stream + 1)));
    mix.next();
    return mix.next();
}

} // namespace gapforge
