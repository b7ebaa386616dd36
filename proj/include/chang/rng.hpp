#pragma once

#include <cstdint>

namespace chang {

/// Deterministic 64-bit generator (SplitMix64) with counter-based
/// splitting. Every random choice in the library flows from a single
/// user seed through `child` streams, so runs are reproducible across
/// platforms and independent of draw interleaving.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1), 53 bits of entropy.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, n).
    std::uint64_t next_below(std::uint64_t n) {
        // Rejection-free modulo is fine here: n is tiny relative to 2^64.
        return next_u64() % n;
    }

    /// Independent child stream identified by a tag. Children of the same
    /// parent with distinct tags never collide in practice.
    Rng child(std::uint64_t tag) const {
        Rng mixed(state_ ^ (0x632be59bd9b4e019ULL * (tag + 1)));
        mixed.next_u64();
        return mixed;
    }

private:
    std::uint64_t state_;
};

}  // namespace chang
