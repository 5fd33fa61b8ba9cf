#pragma once

// Small fixed-size complex matrix kernel: arithmetic, Kronecker products,
// Pauli operators, a cyclic Jacobi eigensolver for Hermitian matrices and the
// PSD square root built on it.
//
// Two-qubit basis ordering is |++>, |+->, |-+>, |--> with qubit A the left
// (slow) tensor factor; |+> is the sigma_z = +1 state.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <sstream>
#include <string>

#include "corrnoise/errors.hpp"

namespace corrnoise {

using cplx = std::complex<double>;

inline constexpr cplx I_unit{0.0, 1.0};

template <std::size_t N>
struct Vec {
    std::array<cplx, N> v{};

    cplx& operator[](std::size_t i) { return v[i]; }
    const cplx& operator[](std::size_t i) const { return v[i]; }

    double norm() const {
        double s = 0.0;
        for (const auto& x : v) s += std::norm(x);
        return std::sqrt(s);
    }
};

template <std::size_t N>
struct Mat {
    static constexpr std::size_t dim = N;
    std::array<cplx, N * N> m{};

    cplx& operator()(std::size_t i, std::size_t j) { return m[i * N + j]; }
    const cplx& operator()(std::size_t i, std::size_t j) const { return m[i * N + j]; }

    static Mat zero() { return Mat{}; }

    static Mat identity() {
        Mat r;
        for (std::size_t i = 0; i < N; ++i) r(i, i) = 1.0;
        return r;
    }

    static Mat diag(const std::array<double, N>& d) {
        Mat r;
        for (std::size_t i = 0; i < N; ++i) r(i, i) = d[i];
        return r;
    }

    Mat& operator+=(const Mat& o) {
        for (std::size_t k = 0; k < N * N; ++k) m[k] += o.m[k];
        return *this;
    }
    Mat& operator-=(const Mat& o) {
        for (std::size_t k = 0; k < N * N; ++k) m[k] -= o.m[k];
        return *this;
    }
    Mat& operator*=(cplx s) {
        for (auto& x : m) x *= s;
        return *this;
    }

    friend bool operator==(const Mat&, const Mat&) = default;
};

using CMat2 = Mat<2>;
using CMat4 = Mat<4>;
using CVec4 = Vec<4>;

template <std::size_t N>
Mat<N> operator+(Mat<N> a, const Mat<N>& b) { return a += b; }

template <std::size_t N>
Mat<N> operator-(Mat<N> a, const Mat<N>& b) { return a -= b; }

template <std::size_t N>
Mat<N> operator-(Mat<N> a) { return a *= -1.0; }

template <std::size_t N>
Mat<N> operator*(Mat<N> a, cplx s) { return a *= s; }

template <std::size_t N>
Mat<N> operator*(cplx s, Mat<N> a) { return a *= s; }

template <std::size_t N>
Mat<N> operator*(Mat<N> a, double s) { return a *= cplx{s, 0.0}; }

template <std::size_t N>
Mat<N> operator*(double s, Mat<N> a) { return a *= cplx{s, 0.0}; }

template <std::size_t N>
Mat<N> operator*(const Mat<N>& a, const Mat<N>& b) {
    Mat<N> r;
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t k = 0; k < N; ++k) {
            const cplx aik = a(i, k);
            if (aik == cplx{}) continue;
            for (std::size_t j = 0; j < N; ++j) r(i, j) += aik * b(k, j);
        }
    return r;
}

template <std::size_t N>
Vec<N> operator*(const Mat<N>& a, const Vec<N>& x) {
    Vec<N> r;
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) r[i] += a(i, j) * x[j];
    return r;
}

template <std::size_t N>
Mat<N> dagger(const Mat<N>& a) {
    Mat<N> r;
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) r(i, j) = std::conj(a(j, i));
    return r;
}

template <std::size_t N>
Mat<N> conj(const Mat<N>& a) {
    Mat<N> r;
    for (std::size_t k = 0; k < N * N; ++k) r.m[k] = std::conj(a.m[k]);
    return r;
}

template <std::size_t N>
cplx trace(const Mat<N>& a) {
    cplx t{};
    for (std::size_t i = 0; i < N; ++i) t += a(i, i);
    return t;
}

template <std::size_t N>
double max_abs(const Mat<N>& a) {
    double r = 0.0;
    for (const auto& x : a.m) r = std::max(r, std::abs(x));
    return r;
}

template <std::size_t N>
double frobenius(const Mat<N>& a) {
    double s = 0.0;
    for (const auto& x : a.m) s += std::norm(x);
    return std::sqrt(s);
}

/// max |M_ij - conj(M_ji)|
template <std::size_t N>
double hermiticity_defect(const Mat<N>& a) {
    double r = 0.0;
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = i; j < N; ++j) r = std::max(r, std::abs(a(i, j) - std::conj(a(j, i))));
    return r;
}

template <std::size_t N>
Mat<N> hermitian_part(const Mat<N>& a) {
    return 0.5 * (a + dagger(a));
}

template <std::size_t N>
Mat<N> commutator(const Mat<N>& a, const Mat<N>& b) {
    return a * b - b * a;
}

template <std::size_t N>
Mat<N> outer(const Vec<N>& x, const Vec<N>& y) {
    Mat<N> r;
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) r(i, j) = x[i] * std::conj(y[j]);
    return r;
}

/// (A (x) B)[P*i+k][P*j+l] = A[i][j] * B[k][l]; A is the slow index.
template <std::size_t M, std::size_t P>
Mat<M * P> kron(const Mat<M>& a, const Mat<P>& b) {
    Mat<M * P> r;
    for (std::size_t i = 0; i < M; ++i)
        for (std::size_t j = 0; j < M; ++j)
            for (std::size_t k = 0; k < P; ++k)
                for (std::size_t l = 0; l < P; ++l) r(P * i + k, P * j + l) = a(i, j) * b(k, l);
    return r;
}

template <std::size_t M, std::size_t P>
Vec<M * P> kron(const Vec<M>& a, const Vec<P>& b) {
    Vec<M * P> r;
    for (std::size_t i = 0; i < M; ++i)
        for (std::size_t k = 0; k < P; ++k) r[P * i + k] = a[i] * b[k];
    return r;
}

namespace pauli {

inline CMat2 id() { return CMat2::identity(); }

inline CMat2 x() {
    CMat2 r;
    r(0, 1) = 1.0;
    r(1, 0) = 1.0;
    return r;
}

inline CMat2 y() {
    CMat2 r;
    r(0, 1) = -I_unit;
    r(1, 0) = I_unit;
    return r;
}

inline CMat2 z() {
    CMat2 r;
    r(0, 0) = 1.0;
    r(1, 1) = -1.0;
    return r;
}

/// sigma_+ = |+><-| = (x + i y) / 2
inline CMat2 plus() {
    CMat2 r;
    r(0, 1) = 1.0;
    return r;
}

inline CMat2 minus() {
    CMat2 r;
    r(1, 0) = 1.0;
    return r;
}

/// Embed a single-qubit operator on qubit A (left factor) or B.
inline CMat4 on_a(const CMat2& op) { return kron(op, id()); }
inline CMat4 on_b(const CMat2& op) { return kron(id(), op); }

} // namespace pauli

template <std::size_t N>
struct EigenSystem {
    std::array<double, N> values{};  // descending
    Mat<N> vectors;                  // column k pairs with values[k]
};

/// Cyclic Jacobi for a Hermitian matrix. Rejects input whose hermiticity
/// defect exceeds tol * max(1, max|M_ij|).
template <std::size_t N>
EigenSystem<N> eig_hermitian(const Mat<N>& input, double tol = 1e-10) {
    const double scale = std::max(1.0, max_abs(input));
    const double defect = hermiticity_defect(input);
    if (!(defect <= tol * scale)) {
        std::ostringstream os;
        os << "eig_hermitian: hermiticity defect " << defect << " exceeds tolerance " << tol * scale;
        throw InvalidParameter(os.str());
    }

    Mat<N> a = hermitian_part(input);
    Mat<N> v = Mat<N>::identity();

    auto off_norm2 = [&a] {
        double s = 0.0;
        for (std::size_t p = 0; p < N; ++p)
            for (std::size_t q = p + 1; q < N; ++q) s += std::norm(a(p, q));
        return s;
    };

    const double fro2 = std::max(std::norm(frobenius(a)), 1e-300);
    for (int sweep = 0; sweep < 100; ++sweep) {
        if (off_norm2() <= 1e-32 * fro2) break;
        for (std::size_t p = 0; p < N; ++p) {
            for (std::size_t q = p + 1; q < N; ++q) {
                const double r = std::abs(a(p, q));
                if (r == 0.0) continue;
                const cplx phase = a(p, q) / r;  // e^{i phi}
                const double alpha = a(p, p).real();
                const double beta = a(q, q).real();
                const double theta = 0.5 * std::atan2(2.0 * r, beta - alpha);
                const double c = std::cos(theta);
                const double s = std::sin(theta);
                // J restricted to (p, q): [[c, s], [-s e^{-i phi}, c e^{-i phi}]]
                const cplx j_pp = c;
                const cplx j_pq = s;
                const cplx j_qp = -s * std::conj(phase);
                const cplx j_qq = c * std::conj(phase);

                for (std::size_t k = 0; k < N; ++k) {  // A <- A J
                    const cplx akp = a(k, p);
                    const cplx akq = a(k, q);
                    a(k, p) = akp * j_pp + akq * j_qp;
                    a(k, q) = akp * j_pq + akq * j_qq;
                }
                for (std::size_t k = 0; k < N; ++k) {  // A <- J^dagger A
                    const cplx apk = a(p, k);
                    const cplx aqk = a(q, k);
                    a(p, k) = std::conj(j_pp) * apk + std::conj(j_qp) * aqk;
                    a(q, k) = std::conj(j_pq) * apk + std::conj(j_qq) * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                for (std::size_t k = 0; k < N; ++k) {  // V <- V J
                    const cplx vkp = v(k, p);
                    const cplx vkq = v(k, q);
                    v(k, p) = vkp * j_pp + vkq * j_qp;
                    v(k, q) = vkp * j_pq + vkq * j_qq;
                }
            }
        }
    }

    std::array<std::size_t, N> order{};
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&a](std::size_t i, std::size_t j) { return a(i, i).real() > a(j, j).real(); });

    EigenSystem<N> out;
    for (std::size_t k = 0; k < N; ++k) {
        out.values[k] = a(order[k], order[k]).real();
        for (std::size_t i = 0; i < N; ++i) out.vectors(i, k) = v(i, order[k]);
    }
    return out;
}

template <std::size_t N>
double min_eigenvalue(const Mat<N>& m) {
    return eig_hermitian(m, 1e-6).values[N - 1];
}

/// V diag(f(lambda)) V^dagger
template <std::size_t N, class F>
Mat<N> spectral_apply(const EigenSystem<N>& es, F&& f) {
    Mat<N> r;
    for (std::size_t k = 0; k < N; ++k) {
        const double fk = f(es.values[k]);
        if (fk == 0.0) continue;
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t j = 0; j < N; ++j)
                r(i, j) += fk * es.vectors(i, k) * std::conj(es.vectors(j, k));
    }
    return r;
}

/// Principal square root of a PSD matrix. Eigenvalues in [-clamp_tol, 0) are
/// clamped to zero; anything lower is a PsdViolation.
template <std::size_t N>
Mat<N> sqrt_psd(const Mat<N>& m, double clamp_tol = 1e-10) {
    const auto es = eig_hermitian(m);
    if (es.values[N - 1] < -clamp_tol) {
        std::ostringstream os;
        os << "sqrt_psd: eigenvalue " << es.values[N - 1] << " below -" << clamp_tol;
        throw PsdViolation(os.str());
    }
    return spectral_apply(es, [](double l) { return std::sqrt(std::max(l, 0.0)); });
}

} // namespace corrnoise
