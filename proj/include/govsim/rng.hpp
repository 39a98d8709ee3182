#pragma once

// Deterministic random streams for reproducible simulation runs.
//
// splitmix64 is used instead of <random> engines/distributions because the
// stdlib distributions are implementation-defined and traces must replay
// bit-identically for a given (scenario, seed).

#include <cmath>
#include <cstdint>
#include <string_view>

namespace govsim {

constexpr std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1).
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform01() < p; }

    /// Box-Muller; consumes exactly two uniform draws per call.
    double gaussian(double mean, double stddev) {
        double u1 = uniform01();
        double u2 = uniform01();
        if (u1 < 0x1.0p-53) u1 = 0x1.0p-53;
        const double r = std::sqrt(-2.0 * std::log(u1));
        return mean + stddev * r * std::cos(2.0 * 3.141592653589793 * u2);
    }

private:
    std::uint64_t state_;
};

/// Derives an independent stream for a named entity from the run's master seed.
inline Rng derive_stream(std::uint64_t master_seed, std::string_view label) {
    Rng seeder(master_seed ^ fnv1a64(label));
    return Rng(seeder.next_u64());
}

} // namespace govsim
