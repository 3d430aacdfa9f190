#pragma once

#include <cstdint>
#include <random>

namespace epc {

/// Deterministic random stream. Wraps std::mt19937_64 (whose output sequence the
/// standard pins down exactly) with hand-rolled samplers, so identical seeds give
/// bit-identical draws on every platform and toolchain.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    /// splitmix64-based stream derivation; chains (seed, a, b) into a child seed.
    static std::uint64_t derive(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

    /// Uniform in [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform() < p; }

    /// Exponential with the given mean (mean = 1/rate).
    double exponential(double mean);

    /// Standard normal (Marsaglia polar; no libm trig), truncated at |z| <= 8 so that
    /// downstream time shifts have a hard bound. The truncation discards ~1e-15 mass.
    double normal();

    /// Exact Poisson sample via cumulative exponential gaps; O(mean) draws.
    std::uint64_t poisson(double mean);

    std::uint64_t raw() { return eng_(); }

private:
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace epc
