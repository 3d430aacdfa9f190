// AVX2 variants of the event kernels. Bit-exact against the scalar references:
// multiplies and adds stay separate (no FMA), rounding uses the same IEEE
// nearest-even / floor semantics, and int64<->double conversion goes through the
// 2^52+2^51 bias trick, which is exact for |v| < 2^51.

#if defined(__x86_64__) || defined(_M_X64)

#include "epc/kernels/kernels.hpp"

#include <immintrin.h>

namespace epc::kernels::detail {

namespace {

constexpr double kBias = 6755399441055744.0;  // 2^52 + 2^51

inline __m256i double_to_i64(__m256d v) {
    // v must be integral with |v| < 2^51
    const __m256d biased = _mm256_add_pd(v, _mm256_set1_pd(kBias));
    return _mm256_sub_epi64(_mm256_castpd_si256(biased),
                            _mm256_castpd_si256(_mm256_set1_pd(kBias)));
}

inline __m256d i64_to_double(__m256i v) {
    // |v| < 2^51
    const __m256i biased = _mm256_add_epi64(v, _mm256_castpd_si256(_mm256_set1_pd(kBias)));
    return _mm256_sub_pd(_mm256_castsi256_pd(biased), _mm256_set1_pd(kBias));
}

} // namespace

void scale_round_i64_avx2(const double* x, double scale, std::int64_t* out, std::size_t n) {
    const __m256d vscale = _mm256_set1_pd(scale);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d v = _mm256_loadu_pd(x + i);
        const __m256d scaled = _mm256_mul_pd(v, vscale);
        const __m256d rounded =
            _mm256_round_pd(scaled, _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
        _mm256_storeu_si256(reinterpret_cast<__m256i*>(out + i), double_to_i64(rounded));
    }
    scale_round_i64_scalar(x + i, scale, out + i, n - i);
}

void bin_delays_avx2(const std::int64_t* b, std::size_t n, std::int64_t a, std::int64_t lo,
                     std::int64_t width, std::uint64_t* hist, std::size_t nbins) {
    const __m256i voffset = _mm256_set1_epi64x(a + lo);
    const __m256d vwidth = _mm256_set1_pd(static_cast<double>(width));
    const __m256d vzero = _mm256_setzero_pd();
    const __m256d vnbins = _mm256_set1_pd(static_cast<double>(nbins));
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i));
        const __m256i delta = _mm256_sub_epi64(vb, voffset);
        const __m256d q = _mm256_div_pd(i64_to_double(delta), vwidth);
        const __m256d f = _mm256_floor_pd(q);
        const __m256d ok = _mm256_and_pd(_mm256_cmp_pd(f, vzero, _CMP_GE_OQ),
                                         _mm256_cmp_pd(f, vnbins, _CMP_LT_OQ));
        const int mask = _mm256_movemask_pd(ok);
        if (mask == 0) continue;
        alignas(16) std::int32_t idx[4];
        _mm_store_si128(reinterpret_cast<__m128i*>(idx), _mm256_cvttpd_epi32(f));
        for (int k = 0; k < 4; ++k)
            if (mask & (1 << k)) ++hist[static_cast<std::size_t>(idx[k])];
    }
    bin_delays_scalar(b + i, n - i, a, lo, width, hist, nbins);
}

bool is_sorted_i64_avx2(const std::int64_t* x, std::size_t n) {
    if (n < 2) return true;
    std::size_t i = 1;
    for (; i + 4 <= n; i += 4) {
        const __m256i prev = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(x + i - 1));
        const __m256i cur = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(x + i));
        const __m256i gt = _mm256_cmpgt_epi64(prev, cur);
        if (_mm256_movemask_pd(_mm256_castsi256_pd(gt)) != 0) return false;
    }
    for (; i < n; ++i)
        if (x[i] < x[i - 1]) return false;
    return true;
}

} // namespace epc::kernels::detail

#endif // x86_64
