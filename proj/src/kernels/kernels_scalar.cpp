// Scalar reference kernels. The AVX2 variants in kernels_avx2.cpp must reproduce
// these bit-for-bit; this translation unit is compiled with -ffp-contract=off so
// the compiler cannot fuse the arithmetic into FMA forms the vector code avoids.

#include "epc/kernels/kernels.hpp"

#include <cmath>

namespace epc::kernels::detail {

void scale_round_i64_scalar(const double* x, double scale, std::int64_t* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
        out[i] = static_cast<std::int64_t>(std::nearbyint(x[i] * scale));
}

void bin_delays_scalar(const std::int64_t* b, std::size_t n, std::int64_t a, std::int64_t lo,
                       std::int64_t width, std::uint64_t* hist, std::size_t nbins) {
    const double w = static_cast<double>(width);
    for (std::size_t i = 0; i < n; ++i) {
        const std::int64_t delta = b[i] - a - lo;
        const double q = std::floor(static_cast<double>(delta) / w);
        if (q >= 0.0 && q < static_cast<double>(nbins))
            ++hist[static_cast<std::size_t>(q)];
    }
}

bool is_sorted_i64_scalar(const std::int64_t* x, std::size_t n) {
    for (std::size_t i = 1; i < n; ++i)
        if (x[i] < x[i - 1]) return false;
    return true;
}

} // namespace epc::kernels::detail
