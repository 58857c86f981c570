#pragma once

// Reproducible random streams.
//
// Engine: std::mt19937_64, whose output sequence is fixed by the C++
// standard. The standard distribution classes are not (their algorithms are
// implementation-defined), so the conversions to uniform, exponential and
// Gaussian variates are written out here:
//
//   uniform in (0,1):  ((bits >> 11) + 0.5) * 2^-53
//   exponential(1):    -log(u)
//   standard normal:   Box-Muller cosine branch, two uniforms per draw
//
// A stream is keyed by (seed, stream id); the engine seed is the SplitMix64
// mix of both, so independent Monte Carlo trials can be generated in any
// order or in parallel.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace robustcp {

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
    return splitmix64(seed ^ splitmix64(stream ^ 0xD1B54A32D192ED03ULL));
}

class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed, std::uint64_t stream = 0) : engine_(mix_seed(seed, stream)) {}

    std::uint64_t next_bits() { return engine_(); }

    double uniform() {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double exponential() { return -std::log(uniform()); }

    double normal() {
        const double u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    std::mt19937_64 engine_;
};

} // namespace robustcp
