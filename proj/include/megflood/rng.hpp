#pragma once

#include <cstdint>
#include <random>

namespace megflood {

// SplitMix64 finalizer; used for seed derivation and engine seeding.
constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Seed-splitting rule for independent streams: stream (a, b) under a master
// seed always gets the same sub-seed, regardless of execution order. This is
// part of the reproducibility contract, so it is fixed here and must not
// change between versions.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                                    std::uint64_t b = 0) {
    std::uint64_t x = mix64(master ^ 0x8f1bbcdcbfa53e0bULL);
    x = mix64(x ^ mix64(a));
    x = mix64(x ^ mix64(b));
    return x;
}

// Deterministic random source. mt19937_64 emits a portable bit stream; the
// draws below avoid std::uniform_*_distribution, whose mapping from bits to
// values is implementation-defined.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(mix64(seed)) {}

    std::uint64_t next_u64() { return engine_(); }

    // Unbiased uniform draw from [0, n). n must be positive.
    std::uint64_t next_below(std::uint64_t n) {
        // reject the partial block at the bottom of the 2^64 range
        const std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

    // Uniform double in [0, 1) with 53 random bits.
    double next_unit() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    bool next_bernoulli(double p) { return next_unit() < p; }

  private:
    std::mt19937_64 engine_;
};

} // namespace megflood
