#include "epc/quantum/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace epc {

Mat4 kron(const Mat2& a, const Mat2& b) {
    Mat4 m;
    for (std::size_t ar = 0; ar < 2; ++ar)
        for (std::size_t ac = 0; ac < 2; ++ac)
            for (std::size_t br = 0; br < 2; ++br)
                for (std::size_t bc = 0; bc < 2; ++bc)
                    m(ar * 2 + br, ac * 2 + bc) = a(ar, ac) * b(br, bc);
    return m;
}

namespace {

// One cyclic Jacobi pass zeroing a(p,q) with a complex rotation.
// For Hermitian A the 2x2 subproblem [[app, apq], [conj(apq), aqq]] is diagonalized by
//   |c         s*e^{i*phi}|
//   |-s*e^{-i*phi}      c |
// with apq = |apq| e^{i*phi} and tan(2*theta) = 2|apq| / (aqq - app).
template <std::size_t N>
void jacobi_rotate(CMat<N>& a, CMat<N>& v, std::size_t p, std::size_t q) {
    const Cx apq = a(p, q);
    const double abs_apq = std::abs(apq);
    if (abs_apq == 0.0) return;

    const double app = a(p, p).real();
    const double aqq = a(q, q).real();
    const Cx phase = apq / abs_apq;

    const double tau = (aqq - app) / (2.0 * abs_apq);
    // stable tan(theta) from tan(2 theta) = 1/tau
    double t;
    if (std::abs(tau) > 1e150) {
        t = 0.5 / tau;
    } else {
        t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
    }
    const double c = 1.0 / std::sqrt(1.0 + t * t);
    const double s = t * c;

    // Column update: A <- U† A U, V <- V U with U as above acting on columns p,q.
    for (std::size_t i = 0; i < N; ++i) {
        const Cx aip = a(i, p);
        const Cx aiq = a(i, q);
        a(i, p) = c * aip - s * std::conj(phase) * aiq;
        a(i, q) = s * phase * aip + c * aiq;
    }
    for (std::size_t i = 0; i < N; ++i) {
        const Cx api = a(p, i);
        const Cx aqi = a(q, i);
        a(p, i) = c * api - s * phase * aqi;
        a(q, i) = s * std::conj(phase) * api + c * aqi;
    }
    for (std::size_t i = 0; i < N; ++i) {
        const Cx vip = v(i, p);
        const Cx viq = v(i, q);
        v(i, p) = c * vip - s * std::conj(phase) * viq;
        v(i, q) = s * phase * vip + c * viq;
    }
    a(p, q) = Cx{};
    a(q, p) = Cx{};
}

template <std::size_t N>
EigenSystem<N> jacobi_eigensystem(CMat<N> a) {
    a = hermitized(a);
    CMat<N> v = CMat<N>::identity();

    double norm = 0.0;
    for (std::size_t i = 0; i < N * N; ++i) norm = std::max(norm, std::abs(a.e[i]));
    const double tol = std::max(norm, 1.0e-300) * 1e-15;

    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < N; ++p)
            for (std::size_t q = p + 1; q < N; ++q) off = std::max(off, std::abs(a(p, q)));
        if (off <= tol) break;
        for (std::size_t p = 0; p < N; ++p)
            for (std::size_t q = p + 1; q < N; ++q) jacobi_rotate(a, v, p, q);
    }

    EigenSystem<N> es;
    std::array<std::size_t, N> order{};
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return a(x, x).real() < a(y, y).real(); });
    for (std::size_t k = 0; k < N; ++k) {
        es.values[k] = a(order[k], order[k]).real();
        for (std::size_t i = 0; i < N; ++i) es.vectors(i, k) = v(i, order[k]);
    }
    return es;
}

} // namespace

EigenSystem<2> hermitian_eigensystem(const Mat2& a) { return jacobi_eigensystem<2>(a); }
EigenSystem<4> hermitian_eigensystem(const Mat4& a) { return jacobi_eigensystem<4>(a); }

Mat4 cholesky_lower(const Mat4& a) {
    Mat4 l;
    for (std::size_t j = 0; j < 4; ++j) {
        double d = a(j, j).real();
        for (std::size_t k = 0; k < j; ++k) d -= std::norm(l(j, k));
        if (!(d > 0.0)) throw std::invalid_argument("cholesky_lower: matrix is not positive definite");
        const double ljj = std::sqrt(d);
        l(j, j) = Cx{ljj, 0.0};
        for (std::size_t i = j + 1; i < 4; ++i) {
            Cx s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * std::conj(l(j, k));
            l(i, j) = s / ljj;
        }
    }
    return l;
}

} // namespace epc
