#include "epc/kernels/kernels.hpp"

#include <cstdlib>
#include <stdexcept>

namespace epc::kernels {

bool avx2_supported() {
#if defined(__x86_64__) || defined(_M_X64)
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

namespace {

Backend resolve_initial() {
    if (const char* env = std::getenv("EPC_KERNELS")) {
        const std::string s(env);
        if (s == "scalar") return Backend::scalar;
        if (s == "avx2") {
            if (!avx2_supported())
                throw std::runtime_error("EPC_KERNELS=avx2 requested but CPU lacks AVX2");
            return Backend::avx2;
        }
        if (!s.empty() && s != "auto")
            throw std::runtime_error("EPC_KERNELS must be 'scalar', 'avx2' or 'auto'");
    }
    return avx2_supported() ? Backend::avx2 : Backend::scalar;
}

Backend& backend_state() {
    static Backend b = resolve_initial();
    return b;
}

} // namespace

Backend active_backend() { return backend_state(); }

void set_backend(Backend b) {
    if (b == Backend::avx2 && !avx2_supported())
        throw std::runtime_error("set_backend: CPU lacks AVX2");
    backend_state() = b;
}

std::string backend_name(Backend b) {
    return b == Backend::avx2 ? "avx2" : "scalar";
}

void scale_round_i64(const double* x, double scale, std::int64_t* out, std::size_t n) {
#if defined(__x86_64__) || defined(_M_X64)
    if (active_backend() == Backend::avx2)
        return detail::scale_round_i64_avx2(x, scale, out, n);
#endif
    detail::scale_round_i64_scalar(x, scale, out, n);
}

void bin_delays(const std::int64_t* b, std::size_t n, std::int64_t a, std::int64_t lo,
                std::int64_t width, std::uint64_t* hist, std::size_t nbins) {
#if defined(__x86_64__) || defined(_M_X64)
    if (active_backend() == Backend::avx2)
        return detail::bin_delays_avx2(b, n, a, lo, width, hist, nbins);
#endif
    detail::bin_delays_scalar(b, n, a, lo, width, hist, nbins);
}

bool is_sorted_i64(const std::int64_t* x, std::size_t n) {
#if defined(__x86_64__) || defined(_M_X64)
    if (active_backend() == Backend::avx2)
        return detail::is_sorted_i64_avx2(x, n);
#endif
    return detail::is_sorted_i64_scalar(x, n);
}

} // namespace epc::kernels
