#pragma once

// Closed-form solutions of the secular dynamics for gA = gB = gamma.
//
// The (a-b-c+d, z) pair relaxes through the rates 6 gamma -/+ kappa with
// kappa = sqrt(4 gamma^2 + 32 G^2); a-d, b-c and w decay at 4 gamma.

#include <cmath>
#include <string>

#include "corrnoise/errors.hpp"
#include "corrnoise/xstate.hpp"

namespace corrnoise::analytic {

inline double kappa(double gamma, double big_gamma) {
    return std::sqrt(4.0 * gamma * gamma + 32.0 * big_gamma * big_gamma);
}

namespace detail {

inline void require_args(double gamma, double t, const char* who) {
    if (!std::isfinite(gamma) || gamma < 0.0) throw InvalidParameter(std::string(who) + ": gamma must be >= 0");
    if (!std::isfinite(t) || t < 0.0) throw InvalidParameter(std::string(who) + ": t must be >= 0");
}

/// e^{-6 g t} cosh(kappa t) and e^{-6 g t} sinh(kappa t) / kappa, written so
/// neither overflows and the kappa -> 0 limit is exact.
struct Hyperbolic {
    double ech;
    double esh_over_kappa;
};

inline Hyperbolic hyperbolic(double gamma, double k, double t) {
    const double kt = k * t;
    const double slow = std::exp((k - 6.0 * gamma) * t);
    const double fast = std::exp(-(k + 6.0 * gamma) * t);
    Hyperbolic h{0.5 * (slow + fast), 0.0};
    if (kt < 1e-6) {
        h.esh_over_kappa = std::exp(-6.0 * gamma * t) * t * (1.0 + kt * kt / 6.0);
    } else {
        h.esh_over_kappa = 0.5 * (slow - fast) / k;
    }
    return h;
}

} // namespace detail

/// General X-state propagator.
inline XState propagate_x(const XState& x0, double gamma, double big_gamma, double t) {
    detail::require_args(gamma, t, "propagate_x");
    const double k = kappa(gamma, big_gamma);
    const auto h = detail::hyperbolic(gamma, k, t);
    const double e4 = std::exp(-4.0 * gamma * t);
    const double delta0 = x0.delta();

    const double delta_t = h.ech * delta0 + h.esh_over_kappa * (16.0 * big_gamma * x0.z - 2.0 * gamma * delta0);
    const double z_t = h.ech * x0.z + h.esh_over_kappa * 2.0 * (delta0 * big_gamma + gamma * x0.z);

    XState r;
    r.a = (2.0 * (x0.a - x0.d) * e4 + 1.0) / 4.0 + 0.25 * delta_t;
    r.b = (2.0 * (x0.b - x0.c) * e4 + 1.0) / 4.0 - 0.25 * delta_t;
    r.c = (2.0 * (x0.c - x0.b) * e4 + 1.0) / 4.0 - 0.25 * delta_t;
    r.d = (2.0 * (x0.d - x0.a) * e4 + 1.0) / 4.0 + 0.25 * delta_t;
    r.z = z_t;
    r.w = x0.w * e4;
    // The constant 1/4 above assumes unit trace; carry any offset of the input.
    const double excess = 0.25 * (x0.trace() - 1.0);
    r.a += excess;
    r.b += excess;
    r.c += excess;
    r.d += excess;
    return r;
}

/// Bell |Phi> = (|++> + |-->)/sqrt(2), evaluated from its own closed forms
/// (rho_11, rho_22, rho_23, rho_14 with rho_33 = rho_22, rho_44 = rho_11).
inline XState bell_phi_solution(double gamma, double big_gamma, double t) {
    detail::require_args(gamma, t, "bell_phi_solution");
    const double k = kappa(gamma, big_gamma);
    if (k * t < 1e-6) return propagate_x(states::bell_phi(), gamma, big_gamma, t);
    // e^{-(6g+k)t} and e^{-(6g+k)t} e^{2kt}
    const double fast = std::exp(-(6.0 * gamma + k) * t);
    const double slow = std::exp((k - 6.0 * gamma) * t);
    const double rho11 = (2.0 * gamma * (fast - slow) + k * (2.0 + slow + fast)) / (8.0 * k);
    const double rho22 = (-2.0 * gamma * (fast - slow) + k * (2.0 - slow - fast)) / (8.0 * k);
    const double rho23 = big_gamma / k * (slow - fast);
    const double rho14 = 0.5 * std::exp(-4.0 * gamma * t);
    return {rho11, rho22, rho22, rho11, rho23, rho14};
}

namespace as_printed {

/// Bell |Psi> forms exactly as originally printed. Their trace is 2: every
/// entry is twice the normalized solution.
inline XState bell_psi(double gamma, double big_gamma, double t) {
    detail::require_args(gamma, t, "as_printed::bell_psi");
    const double k = kappa(gamma, big_gamma);
    if (k * t < 1e-6) {
        XState x = propagate_x(states::bell_psi(), gamma, big_gamma, t);
        return 2.0 * x;
    }
    const double fast = std::exp(-(6.0 * gamma + k) * t);
    const double slow = std::exp((k - 6.0 * gamma) * t);
    const double g8 = 2.0 * gamma + 8.0 * big_gamma;
    const double rho11 = (-g8 * (fast - slow) - k * (fast + slow - 2.0)) / (4.0 * k);
    const double rho22 = (g8 * (fast - slow) + k * (fast + slow + 2.0)) / (4.0 * k);
    const double rho23 = (-(4.0 * gamma - 8.0 * big_gamma) * (fast - slow) + 2.0 * k * (fast + slow)) / (4.0 * k);
    return {rho11, rho22, rho22, rho11, rho23, 0.0};
}

} // namespace as_printed

/// Bell |Psi> = (|+-> + |-+>)/sqrt(2): the printed forms times 1/2.
inline XState bell_psi_solution(double gamma, double big_gamma, double t) {
    return 0.5 * as_printed::bell_psi(gamma, big_gamma, t);
}

} // namespace corrnoise::analytic
