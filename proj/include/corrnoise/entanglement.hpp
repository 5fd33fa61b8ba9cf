#pragma once

// Wootters concurrence (general and X-state fast path), sudden-death
// detection and branch-dominance analysis.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "corrnoise/errors.hpp"
#include "corrnoise/linalg.hpp"
#include "corrnoise/model.hpp"
#include "corrnoise/xstate.hpp"

namespace corrnoise {

/// (sigma_y (x) sigma_y) conj(rho) (sigma_y (x) sigma_y)
inline CMat4 spin_flip(const CMat4& rho) {
    static const CMat4 yy = kron(pauli::y(), pauli::y());
    return yy * conj(rho) * yy;
}

/// Eigenvalues (descending) of rho * spin_flip(rho), computed through the
/// Hermitian similar matrix sqrt(rho) spin_flip(rho) sqrt(rho).
inline std::array<double, 4> wootters_eigenvalues(const CMat4& rho) {
    require_hermitian(rho, "concurrence");
    const CMat4 root = sqrt_psd(rho);
    const CMat4 r = hermitian_part(root * spin_flip(rho) * root);
    auto vals = eig_hermitian(r, 1e-8).values;
    for (auto& v : vals) v = std::max(v, 0.0);
    return vals;
}

/// max{0, sqrt(l1) - sqrt(l2) - sqrt(l3) - sqrt(l4)}, clamped to [0, 1].
/// Throws PsdViolation if rho has an eigenvalue below -1e-10.
inline double concurrence(const CMat4& rho) {
    const auto l = wootters_eigenvalues(rho);
    const double c = std::sqrt(l[0]) - std::sqrt(l[1]) - std::sqrt(l[2]) - std::sqrt(l[3]);
    return std::clamp(c, 0.0, 1.0);
}

struct ConcurrencePoint {
    double t = 0.0;
    double value = 0.0;
    double branch_z = 0.0;  // |rho_23| - sqrt(rho_11 rho_44)
    double branch_w = 0.0;  // |rho_14| - sqrt(rho_22 rho_33)
};

/// 2 max{0, |z| - sqrt(ad), |w| - sqrt(bc)} with both branches exposed.
inline ConcurrencePoint concurrence_x(const XState& x, double t = 0.0) {
    ConcurrencePoint p;
    p.t = t;
    p.branch_z = std::abs(x.z) - std::sqrt(std::max(0.0, x.a * x.d));
    p.branch_w = std::abs(x.w) - std::sqrt(std::max(0.0, x.b * x.c));
    p.value = 2.0 * std::max({0.0, p.branch_z, p.branch_w});
    return p;
}

/// Branch values read from the X entries of a general matrix, with the value
/// from the general Wootters route.
inline ConcurrencePoint concurrence_point(const CMat4& rho, double t = 0.0) {
    ConcurrencePoint p;
    p.t = t;
    p.branch_z = std::abs(rho(1, 2)) - std::sqrt(std::max(0.0, rho(0, 0).real() * rho(3, 3).real()));
    p.branch_w = std::abs(rho(0, 3)) - std::sqrt(std::max(0.0, rho(1, 1).real() * rho(2, 2).real()));
    p.value = concurrence(rho);
    return p;
}

enum class CrossingKind { Death, Revival };

struct Crossing {
    CrossingKind kind;
    double t;
};

/// Scans [0, t_max] on `grid_points` uniform points for changes of (C > 0)
/// and refines each by bisection to |dt| <= tol. C has a kink at the
/// crossing, so no derivative information is used.
inline std::vector<Crossing> esd_time(const std::function<double(double)>& curve, double t_max,
                                      std::size_t grid_points = 2000, double tol = 1e-10) {
    if (grid_points < 400) throw InvalidParameter("esd_time: scan grid must have at least 400 points");
    if (!(t_max > 0.0)) throw InvalidParameter("esd_time: t_max must be > 0");
    std::vector<Crossing> out;
    auto alive = [&curve](double t) { return curve(t) > 0.0; };
    const double h = t_max / static_cast<double>(grid_points - 1);
    double t_prev = 0.0;
    bool prev = alive(0.0);
    for (std::size_t i = 1; i < grid_points; ++i) {
        const double t = (i + 1 == grid_points) ? t_max : h * static_cast<double>(i);
        const bool cur = alive(t);
        if (cur != prev) {
            double lo = t_prev, hi = t;  // alive(lo) == prev
            while (hi - lo > tol) {
                const double mid = 0.5 * (lo + hi);
                if (alive(mid) == prev) lo = mid;
                else hi = mid;
            }
            out.push_back({prev ? CrossingKind::Death : CrossingKind::Revival, 0.5 * (lo + hi)});
        }
        prev = cur;
        t_prev = t;
    }
    return out;
}

inline std::vector<double> death_times(const std::vector<Crossing>& cs) {
    std::vector<double> r;
    for (const auto& c : cs)
        if (c.kind == CrossingKind::Death) r.push_back(c.t);
    return r;
}

/// Times (midpoints between grid neighbours) where the dominant branch
/// switches while C > 0 on at least one side. Points whose branches agree
/// within tie_tol have no dominant branch and never count as a switch.
inline std::vector<double> dominance_crossover(const std::vector<ConcurrencePoint>& series,
                                               double tie_tol = 1e-12) {
    std::vector<double> out;
    int last = 0;  // 0 none, 1 z, 2 w
    const ConcurrencePoint* last_pt = nullptr;
    for (const auto& p : series) {
        const double diff = p.branch_z - p.branch_w;
        const int dom = std::abs(diff) <= tie_tol ? 0 : (diff > 0.0 ? 1 : 2);
        if (dom == 0) continue;
        if (last != 0 && dom != last && (p.value > 0.0 || last_pt->value > 0.0))
            out.push_back(0.5 * (p.t + last_pt->t));
        last = dom;
        last_pt = &p;
    }
    return out;
}

} // namespace corrnoise
