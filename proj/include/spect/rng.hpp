#pragma once

#include <cstdint>

namespace spect {

// PCG32 (O'Neill's pcg32_srandom / XSH-RR output). Fixed multiplier and
// odd increment give identical streams on every platform.
struct Pcg32 {
    uint64_t state = 0;
    uint64_t inc = 0xda3e39cb94b95bdbULL | 1u;

    explicit Pcg32(uint64_t seed = 0, uint64_t seq = 0x853c49e6748fea9bULL) {
        state = 0;
        inc = (seq << 1u) | 1u;
        next();
        state += seed;
        next();
    }

    uint32_t next() {
        uint64_t old = state;
        state = old * 6364136223846793005ULL + inc;
        uint32_t xorshifted = static_cast<uint32_t>(((old >> 18u) ^ old) >> 27u);
        uint32_t rot = static_cast<uint32_t>(old >> 59u);
        return (xorshifted >> rot) | (xorshifted << ((32u - rot) & 31u));
    }

    // Uniform in the open interval (0, 1); never returns 0, safe under log().
    double uniform() { return (static_cast<double>(next()) + 0.5) * (1.0 / 4294967296.0); }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    // Uniform integer in [0, bound). Multiply-shift map of one 32-bit draw;
    // the <= 2^-32 bias is irrelevant for the small bounds used here.
    uint32_t bounded(uint32_t bound) {
        return static_cast<uint32_t>((static_cast<uint64_t>(next()) * bound) >> 32);
    }
};

// splitmix64 finalizer; used to derive independent per-item seeds from a
// dataset seed so items can be generated in any order (or in parallel).
inline uint64_t derive_seed(uint64_t seed, uint64_t index) {
    uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace spect
