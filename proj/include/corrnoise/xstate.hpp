#pragma once

#include <cmath>
#include <string>

#include "corrnoise/linalg.hpp"

namespace corrnoise {

/// X-form two-qubit state
///
///     | a  0  0  w |
///     | 0  b  z  0 |
///     | 0  z  c  0 |
///     | w  0  0  d |
///
/// with real coherences z = rho_23 and w = rho_14. Also used as the
/// derivative type of the secular sector dynamics.
struct XState {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double d = 0.0;
    double z = 0.0;
    double w = 0.0;

    double trace() const { return a + b + c + d; }

    /// a - b - c + d, the population combination coupled to z.
    double delta() const { return a - b - c + d; }

    XState& operator+=(const XState& o) {
        a += o.a; b += o.b; c += o.c; d += o.d; z += o.z; w += o.w;
        return *this;
    }
    XState& operator*=(double s) {
        a *= s; b *= s; c *= s; d *= s; z *= s; w *= s;
        return *this;
    }

    friend XState operator+(XState l, const XState& r) { return l += r; }
    friend XState operator-(XState l, const XState& r) {
        l.a -= r.a; l.b -= r.b; l.c -= r.c; l.d -= r.d; l.z -= r.z; l.w -= r.w;
        return l;
    }
    friend XState operator*(double s, XState x) { return x *= s; }
    friend XState operator*(XState x, double s) { return x *= s; }
    friend bool operator==(const XState&, const XState&) = default;

    static XState maximally_mixed() { return {0.25, 0.25, 0.25, 0.25, 0.0, 0.0}; }
};

inline double max_abs_diff(const XState& l, const XState& r) {
    const XState d = l - r;
    return std::max({std::abs(d.a), std::abs(d.b), std::abs(d.c), std::abs(d.d), std::abs(d.z), std::abs(d.w)});
}

/// Populations sum to one and are non-negative, both within tol.
inline bool is_valid(const XState& x, double tol = 1e-12) {
    if (!(std::abs(x.trace() - 1.0) <= tol)) return false;
    return x.a >= -tol && x.b >= -tol && x.c >= -tol && x.d >= -tol;
}

/// PSD iff both 2x2 blocks are PSD.
inline bool is_psd(const XState& x, double tol = 1e-12) {
    if (x.a < -tol || x.b < -tol || x.c < -tol || x.d < -tol) return false;
    return std::abs(x.z) <= std::sqrt(std::max(0.0, x.b * x.c)) + tol &&
           std::abs(x.w) <= std::sqrt(std::max(0.0, x.a * x.d)) + tol;
}

inline void require_valid(const XState& x, const char* who) {
    if (!is_valid(x)) throw InvalidParameter(std::string(who) + ": X state populations must be >= 0 and sum to 1");
}

inline CMat4 to_matrix(const XState& x) {
    CMat4 r;
    r(0, 0) = x.a;
    r(1, 1) = x.b;
    r(2, 2) = x.c;
    r(3, 3) = x.d;
    r(1, 2) = x.z;
    r(2, 1) = x.z;
    r(0, 3) = x.w;
    r(3, 0) = x.w;
    return r;
}

/// Reads the X entries of a matrix. z keeps its sign (real part of rho_32);
/// w is the magnitude |rho_14|, which is phase-free under the H_S rotation.
inline XState x_from_matrix(const CMat4& m) {
    return {m(0, 0).real(), m(1, 1).real(), m(2, 2).real(), m(3, 3).real(), m(2, 1).real(), std::abs(m(3, 0))};
}

/// Largest magnitude outside the diagonal and anti-diagonal.
inline double x_form_defect(const CMat4& m) {
    double r = 0.0;
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j)
            if (i != j && i + j != 3) r = std::max(r, std::abs(m(i, j)));
    return r;
}

namespace states {

inline XState bell_phi() { return {0.5, 0.0, 0.0, 0.5, 0.0, 0.5}; }
inline XState bell_psi() { return {0.0, 0.5, 0.5, 0.0, 0.5, 0.0}; }

/// (1/3) [[1/2,0,0,3/2],[0,1,1,0],[0,1,1,0],[3/2,0,0,1/2]] as printed. Not PSD.
inline XState fig4_printed() { return {1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0, 1.0 / 3.0, 0.5}; }

/// p |Phi><Phi| + (1 - p) I/4
inline XState werner_phi(double p) {
    const double pop = 0.25 * (1.0 - p);
    return {pop + 0.5 * p, pop, pop, pop + 0.5 * p, 0.0, 0.5 * p};
}

inline CVec4 basis(std::size_t k) {
    CVec4 v;
    v[k] = 1.0;
    return v;
}

/// (|+-> - |-+>)/sqrt(2)
inline CVec4 singlet() {
    CVec4 v;
    v[1] = 1.0 / std::sqrt(2.0);
    v[2] = -1.0 / std::sqrt(2.0);
    return v;
}

inline CVec4 bell_phi_vector() {
    CVec4 v;
    v[0] = 1.0 / std::sqrt(2.0);
    v[3] = 1.0 / std::sqrt(2.0);
    return v;
}

inline CVec4 bell_psi_vector() {
    CVec4 v;
    v[1] = 1.0 / std::sqrt(2.0);
    v[2] = 1.0 / std::sqrt(2.0);
    return v;
}

} // namespace states

} // namespace corrnoise
