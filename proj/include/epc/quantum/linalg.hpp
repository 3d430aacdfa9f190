#pragma once

#include <array>
#include <complex>
#include <cstddef>

namespace epc {

using Cx = std::complex<double>;

/// Dense NxN complex matrix with value semantics. Row-major.
template <std::size_t N>
struct CMat {
    std::array<Cx, N * N> e{};

    static constexpr std::size_t dim = N;

    Cx& operator()(std::size_t r, std::size_t c) { return e[r * N + c]; }
    const Cx& operator()(std::size_t r, std::size_t c) const { return e[r * N + c]; }

    static CMat identity() {
        CMat m;
        for (std::size_t i = 0; i < N; ++i) m(i, i) = Cx{1.0, 0.0};
        return m;
    }

    static CMat zero() { return CMat{}; }

    CMat adjoint() const {
        CMat m;
        for (std::size_t r = 0; r < N; ++r)
            for (std::size_t c = 0; c < N; ++c) m(r, c) = std::conj((*this)(c, r));
        return m;
    }

    Cx trace() const {
        Cx t{};
        for (std::size_t i = 0; i < N; ++i) t += (*this)(i, i);
        return t;
    }

    CMat& operator+=(const CMat& o) {
        for (std::size_t i = 0; i < N * N; ++i) e[i] += o.e[i];
        return *this;
    }
    CMat& operator-=(const CMat& o) {
        for (std::size_t i = 0; i < N * N; ++i) e[i] -= o.e[i];
        return *this;
    }
    CMat& operator*=(Cx s) {
        for (std::size_t i = 0; i < N * N; ++i) e[i] *= s;
        return *this;
    }

    friend CMat operator+(CMat a, const CMat& b) { return a += b; }
    friend CMat operator-(CMat a, const CMat& b) { return a -= b; }
    friend CMat operator*(CMat a, Cx s) { return a *= s; }
    friend CMat operator*(Cx s, CMat a) { return a *= s; }

    friend CMat operator*(const CMat& a, const CMat& b) {
        CMat m;
        for (std::size_t r = 0; r < N; ++r)
            for (std::size_t k = 0; k < N; ++k) {
                const Cx ark = a(r, k);
                if (ark == Cx{}) continue;
                for (std::size_t c = 0; c < N; ++c) m(r, c) += ark * b(k, c);
            }
        return m;
    }
};

using Mat2 = CMat<2>;
using Mat4 = CMat<4>;

/// Kronecker product; index order (a_row*2 + b_row, a_col*2 + b_col), i.e. A is the left factor.
Mat4 kron(const Mat2& a, const Mat2& b);

/// max_ij |a_ij - b_ij|
template <std::size_t N>
double max_abs_diff(const CMat<N>& a, const CMat<N>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < N * N; ++i) m = std::max(m, std::abs(a.e[i] - b.e[i]));
    return m;
}

template <std::size_t N>
double frobenius_distance(const CMat<N>& a, const CMat<N>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < N * N; ++i) s += std::norm(a.e[i] - b.e[i]);
    return std::sqrt(s);
}

/// Deviation from Hermitian symmetry: max_ij |a_ij - conj(a_ji)|.
template <std::size_t N>
double hermiticity_defect(const CMat<N>& a) {
    double m = 0.0;
    for (std::size_t r = 0; r < N; ++r)
        for (std::size_t c = 0; c < N; ++c) m = std::max(m, std::abs(a(r, c) - std::conj(a(c, r))));
    return m;
}

/// (A + A†)/2
template <std::size_t N>
CMat<N> hermitized(const CMat<N>& a) {
    CMat<N> m;
    for (std::size_t r = 0; r < N; ++r)
        for (std::size_t c = 0; c < N; ++c) m(r, c) = 0.5 * (a(r, c) + std::conj(a(c, r)));
    return m;
}

template <std::size_t N>
struct EigenSystem {
    std::array<double, N> values{};  // ascending
    CMat<N> vectors;                 // column k is the eigenvector for values[k]
};

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi sweeps.
/// Off-diagonal residual is driven below ~1e-14 * ||A||; plenty for 2x2/4x4 states.
EigenSystem<2> hermitian_eigensystem(const Mat2& a);
EigenSystem<4> hermitian_eigensystem(const Mat4& a);

/// Cholesky factor L (lower-triangular, L*L† = a) of a Hermitian positive-definite matrix.
/// Throws std::invalid_argument if a pivot is not positive.
Mat4 cholesky_lower(const Mat4& a);

} // namespace epc
