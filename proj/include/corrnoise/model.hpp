#pragma once

// Noise parameters and the averaged master-equation generator.
//
// The generator is
//
//   drho/dt = -i[H_S, rho]
//             - 2 gA (rho - XA rho XA) - 2 gB (rho - XB rho XB)
//             - k G  (XA XB rho + rho XA XB - XA rho XB - XB rho XA)
//
// with H_S = (omega/2)(ZA + ZB). k = 2 (Calibrated) matches the closed-form
// solutions and the positivity bound |G| <= sqrt(gA gB); k = 4 is the
// coefficient as originally printed.

#include <array>
#include <cmath>
#include <sstream>
#include <string>
#include <string_view>

#include "corrnoise/errors.hpp"
#include "corrnoise/linalg.hpp"
#include "corrnoise/xstate.hpp"

namespace corrnoise {

struct NoiseParams {
    double gamma_a = 0.0;
    double gamma_b = 0.0;
    double big_gamma = 0.0;
    double omega = 0.0;

    static NoiseParams symmetric(double gamma, double big_gamma, double omega = 0.0) {
        return {gamma, gamma, big_gamma, omega};
    }

    friend bool operator==(const NoiseParams&, const NoiseParams&) = default;
};

enum class GeneratorConvention { PrintedEq6, Calibrated };

/// Full generator, or its rotating-wave (secular) projection which drops the
/// couplings oscillating at 2 omega.
enum class Dynamics { Full, Secular };

/// Which ladder-operator terms liouvillian_apply_pm includes.
enum class PmTerms { AsPrinted, WithCounterRotating };

inline std::string_view to_string(GeneratorConvention c) {
    return c == GeneratorConvention::Calibrated ? "calibrated" : "printed-eq6";
}

inline std::string_view to_string(Dynamics d) { return d == Dynamics::Full ? "full" : "secular"; }

inline GeneratorConvention convention_from_string(std::string_view s) {
    if (s == "calibrated") return GeneratorConvention::Calibrated;
    if (s == "printed-eq6") return GeneratorConvention::PrintedEq6;
    throw InvalidParameter("unknown generator convention '" + std::string(s) + "'");
}

inline Dynamics dynamics_from_string(std::string_view s) {
    if (s == "full") return Dynamics::Full;
    if (s == "secular") return Dynamics::Secular;
    throw InvalidParameter("unknown dynamics '" + std::string(s) + "'");
}

/// k in the cross term k * G (...).
inline double cross_coefficient(GeneratorConvention c) {
    return c == GeneratorConvention::Calibrated ? 2.0 : 4.0;
}

struct PhysicalityReport {
    bool physical = false;
    double bound = 0.0;                            // sqrt(gA gB)
    std::array<std::array<double, 2>, 2> covariance{};  // per unit time
    bool covariance_psd = false;
    double covariance_min_eigenvalue = 0.0;
};

inline void require_finite(const NoiseParams& p) {
    if (!std::isfinite(p.gamma_a) || !std::isfinite(p.gamma_b) || !std::isfinite(p.big_gamma) ||
        !std::isfinite(p.omega))
        throw InvalidParameter("noise parameters must be finite");
}

/// Throws InvalidParameter on negative or non-finite rates; otherwise reports
/// whether the noise covariance [[2gA, 2G], [2G, 2gB]] is PSD.
inline PhysicalityReport validate(const NoiseParams& p) {
    require_finite(p);
    if (p.gamma_a < 0.0 || p.gamma_b < 0.0) {
        std::ostringstream os;
        os << "noise strengths must be non-negative (gamma_a=" << p.gamma_a << ", gamma_b=" << p.gamma_b << ")";
        throw InvalidParameter(os.str());
    }
    PhysicalityReport r;
    r.bound = std::sqrt(p.gamma_a * p.gamma_b);
    r.covariance = {{{2.0 * p.gamma_a, 2.0 * p.big_gamma}, {2.0 * p.big_gamma, 2.0 * p.gamma_b}}};
    const double tr = r.covariance[0][0] + r.covariance[1][1];
    const double det = r.covariance[0][0] * r.covariance[1][1] - r.covariance[0][1] * r.covariance[1][0];
    r.covariance_min_eigenvalue = 0.5 * (tr - std::sqrt(std::max(0.0, tr * tr - 4.0 * det)));
    r.physical = std::abs(p.big_gamma) <= r.bound * (1.0 + 1e-12);
    r.covariance_psd = r.physical;
    return r;
}

/// validate() plus rejection of unphysical correlation unless allowed.
inline void require_physical(const NoiseParams& p, bool allow_unphysical = false) {
    const auto rep = validate(p);
    if (!rep.physical && !allow_unphysical) {
        std::ostringstream os;
        os << "unphysical correlation |big_gamma|=" << std::abs(p.big_gamma) << " exceeds sqrt(gamma_a*gamma_b)="
           << rep.bound << " (the averaged dynamics would not preserve positivity)";
        throw InvalidParameter(os.str());
    }
}

namespace ops {

inline const CMat4& xa() {
    static const CMat4 m = pauli::on_a(pauli::x());
    return m;
}
inline const CMat4& xb() {
    static const CMat4 m = pauli::on_b(pauli::x());
    return m;
}
inline const CMat4& xaxb() {
    static const CMat4 m = xa() * xb();
    return m;
}
inline const CMat4& z_total() {
    static const CMat4 m = pauli::on_a(pauli::z()) + pauli::on_b(pauli::z());
    return m;
}
inline const CMat4& pa() {
    static const CMat4 m = pauli::on_a(pauli::plus());
    return m;
}
inline const CMat4& ma() {
    static const CMat4 m = pauli::on_a(pauli::minus());
    return m;
}
inline const CMat4& pb() {
    static const CMat4 m = pauli::on_b(pauli::plus());
    return m;
}
inline const CMat4& mb() {
    static const CMat4 m = pauli::on_b(pauli::minus());
    return m;
}

} // namespace ops

inline CMat4 system_hamiltonian(double omega) { return (0.5 * omega) * ops::z_total(); }

inline void require_hermitian(const CMat4& rho, const char* who, double tol = 1e-10) {
    const double defect = hermiticity_defect(rho);
    if (!(defect <= tol)) {
        std::ostringstream os;
        os << who << ": input not Hermitian (defect " << defect << ")";
        throw InvalidParameter(os.str());
    }
}

namespace detail {

inline CMat4 liouvillian_sigma_x(const NoiseParams& p, double k, const CMat4& rho) {
    const CMat4& xa = ops::xa();
    const CMat4& xb = ops::xb();
    const CMat4& xx = ops::xaxb();
    CMat4 out = cplx{0.0, -1.0} * commutator(system_hamiltonian(p.omega), rho);
    out -= (2.0 * p.gamma_a) * (rho - xa * rho * xa);
    out -= (2.0 * p.gamma_b) * (rho - xb * rho * xb);
    if (p.big_gamma != 0.0)
        out -= (k * p.big_gamma) * (xx * rho + rho * xx - xa * rho * xb - xb * rho * xa);
    return out;
}

inline CMat4 liouvillian_ladder(const NoiseParams& p, double k, PmTerms terms, const CMat4& rho) {
    const CMat4 &pa = ops::pa(), &ma = ops::ma(), &pb = ops::pb(), &mb = ops::mb();
    const double g = 0.5 * k * p.big_gamma;

    // Bracketed terms of the ladder form; the dissipator is T + T^dagger.
    CMat4 t;
    t -= p.gamma_a * (pa * ma * rho - ma * rho * pa - pa * rho * ma + rho * ma * pa);
    t -= p.gamma_b * (pb * mb * rho - mb * rho * pb - pb * rho * mb + rho * mb * pb);
    t -= g * (pa * mb * rho - mb * rho * pa - pa * rho * mb + rho * mb * pa);
    t -= g * (pb * ma * rho - ma * rho * pb - pb * rho * ma + rho * ma * pb);

    CMat4 out = cplx{0.0, -1.0} * commutator(system_hamiltonian(p.omega), rho) + t + dagger(t);

    if (terms == PmTerms::WithCounterRotating) {
        out += (2.0 * p.gamma_a) * (pa * rho * pa + ma * rho * ma);
        out += (2.0 * p.gamma_b) * (pb * rho * pb + mb * rho * mb);
        const CMat4 q = pa * pb + ma * mb;
        out -= (k * p.big_gamma) * (q * rho + rho * q - pa * rho * pb - ma * rho * mb - pb * rho * pa - mb * rho * ma);
    }
    return out;
}

} // namespace detail

/// drho/dt in the sigma_x form. Output is traceless and Hermitian.
inline CMat4 liouvillian_apply(const NoiseParams& p, GeneratorConvention conv, const CMat4& rho) {
    require_hermitian(rho, "liouvillian_apply");
    return detail::liouvillian_sigma_x(p, cross_coefficient(conv), rho);
}

/// The same map written with sigma_+/sigma_- ladder operators. AsPrinted keeps
/// only the energy-conserving terms (the secular generator); adding the
/// counter-rotating terms reproduces liouvillian_apply exactly.
inline CMat4 liouvillian_apply_pm(const NoiseParams& p, const CMat4& rho,
                                  GeneratorConvention conv = GeneratorConvention::Calibrated,
                                  PmTerms terms = PmTerms::AsPrinted) {
    require_hermitian(rho, "liouvillian_apply_pm");
    return detail::liouvillian_ladder(p, cross_coefficient(conv), terms, rho);
}

/// Generator selected by (convention, dynamics); no input checks.
inline CMat4 generator_apply(const NoiseParams& p, GeneratorConvention conv, Dynamics dyn, const CMat4& rho) {
    const double k = cross_coefficient(conv);
    return dyn == Dynamics::Full ? detail::liouvillian_sigma_x(p, k, rho)
                                 : detail::liouvillian_ladder(p, k, PmTerms::AsPrinted, rho);
}

/// Secular sector dynamics for gA = gB = gamma, real z and w:
///
///   a' = -4g a + 2g (b + c) + 2kG z     d' = -4g d + 2g (b + c) + 2kG z
///   b' = -4g b + 2g (a + d) - 2kG z     c' = -4g c + 2g (a + d) - 2kG z
///   z' = -4g z + kG (a - b - c + d)     w' = -4g w
inline XState secular_rhs(const XState& x, double gamma, double big_gamma,
                          GeneratorConvention conv = GeneratorConvention::Calibrated) {
    const double k = cross_coefficient(conv);
    const double pops_ad = 2.0 * gamma * (x.b + x.c) + 2.0 * k * big_gamma * x.z;
    const double pops_bc = 2.0 * gamma * (x.a + x.d) - 2.0 * k * big_gamma * x.z;
    return {-4.0 * gamma * x.a + pops_ad,
            -4.0 * gamma * x.b + pops_bc,
            -4.0 * gamma * x.c + pops_bc,
            -4.0 * gamma * x.d + pops_ad,
            -4.0 * gamma * x.z + k * big_gamma * x.delta(),
            -4.0 * gamma * x.w};
}

/// Coefficient matrix of the (a-b-c+d, z) subsystem: [[-8g, 8kG], [kG, -4g]].
inline std::array<std::array<double, 2>, 2> sector_matrix(double gamma, double big_gamma,
                                                          GeneratorConvention conv = GeneratorConvention::Calibrated) {
    const double k = cross_coefficient(conv);
    return {{{-8.0 * gamma, 8.0 * k * big_gamma}, {k * big_gamma, -4.0 * gamma}}};
}

} // namespace corrnoise
