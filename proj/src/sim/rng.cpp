#include "epc/sim/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace epc {

namespace {
std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}
} // namespace

std::uint64_t Rng::derive(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    return splitmix64(splitmix64(splitmix64(seed) ^ a) ^ b);
}

double Rng::exponential(double mean) {
    if (!(mean > 0.0)) throw std::invalid_argument("exponential: mean must be positive");
    // -log1p(-u) = -ln(1-u), u in [0,1) keeps the result finite and >= 0
    return -std::log1p(-uniform()) * mean;
}

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    for (;;) {
        const double x = 2.0 * uniform() - 1.0;
        const double y = 2.0 * uniform() - 1.0;
        const double r2 = x * x + y * y;
        if (r2 >= 1.0 || r2 == 0.0) continue;
        const double f = std::sqrt(-2.0 * std::log(r2) / r2);
        const double z0 = x * f;
        const double z1 = y * f;
        if (std::abs(z0) > 8.0 || std::abs(z1) > 8.0) continue;
        spare_ = z1;
        has_spare_ = true;
        return z0;
    }
}

std::uint64_t Rng::poisson(double mean) {
    if (mean < 0.0) throw std::invalid_argument("poisson: mean must be nonnegative");
    if (mean == 0.0) return 0;
    std::uint64_t n = 0;
    double t = exponential(1.0);
    while (t <= mean) {
        ++n;
        t += exponential(1.0);
    }
    return n;
}

} // namespace epc
