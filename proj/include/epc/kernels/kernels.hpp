#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

namespace epc::kernels {

/// Backend selection for the data-parallel event kernels. The AVX2 variants are
/// bit-exact equivalents of the scalar references (no FMA contraction, identical
/// IEEE rounding), so the selection never changes results, only speed.
enum class Backend { scalar, avx2 };

/// Active backend: resolved once from CPU support, overridable by the
/// EPC_KERNELS environment variable ("scalar" or "avx2") or set_backend().
Backend active_backend();
void set_backend(Backend b);
bool avx2_supported();
std::string backend_name(Backend b);

/// out[i] = int64 round-to-nearest-even of x[i] * scale.
/// Contract: |x[i] * scale| < 2^51 for every i.
void scale_round_i64(const double* x, double scale, std::int64_t* out, std::size_t n);

/// Histogram accumulation of deltas (b[i] - a) against bins of the given width:
/// bin = floor(double(b[i] - a - lo) / double(width)), counted when 0 <= bin < nbins.
/// The quotient uses IEEE double division in both variants. Contract: |b[i] - a| < 2^51.
void bin_delays(const std::int64_t* b, std::size_t n, std::int64_t a, std::int64_t lo,
                std::int64_t width, std::uint64_t* hist, std::size_t nbins);

/// True when x is nondecreasing.
bool is_sorted_i64(const std::int64_t* x, std::size_t n);

namespace detail {
void scale_round_i64_scalar(const double* x, double scale, std::int64_t* out, std::size_t n);
void bin_delays_scalar(const std::int64_t* b, std::size_t n, std::int64_t a, std::int64_t lo,
                       std::int64_t width, std::uint64_t* hist, std::size_t nbins);
bool is_sorted_i64_scalar(const std::int64_t* x, std::size_t n);
#if defined(__x86_64__) || defined(_M_X64)
void scale_round_i64_avx2(const double* x, double scale, std::int64_t* out, std::size_t n);
void bin_delays_avx2(const std::int64_t* b, std::size_t n, std::int64_t a, std::int64_t lo,
                     std::int64_t width, std::uint64_t* hist, std::size_t nbins);
bool is_sorted_i64_avx2(const std::int64_t* x, std::size_t n);
#endif
} // namespace detail

} // namespace epc::kernels
