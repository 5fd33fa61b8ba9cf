#pragma once

// Fixed-step classical RK4 for the 4x4 master equation and for the
// six-parameter secular sector system. No renormalization happens mid-run:
// trace and hermiticity drift are recorded per snapshot instead.

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "corrnoise/errors.hpp"
#include "corrnoise/linalg.hpp"
#include "corrnoise/model.hpp"
#include "corrnoise/xstate.hpp"

namespace corrnoise {

struct Diagnostics {
    double trace_deviation = 0.0;
    double hermiticity_defect = 0.0;
    double min_eigenvalue = 0.0;
};

inline Diagnostics diagnose(const CMat4& m) {
    return {std::abs(trace(m) - 1.0), hermiticity_defect(m), min_eigenvalue(m)};
}

inline Diagnostics diagnose(const XState& x) { return diagnose(to_matrix(x)); }

template <class State>
struct EvolutionSeries {
    std::vector<double> times;
    std::vector<State> states;
    std::vector<Diagnostics> diagnostics;
    GeneratorConvention convention = GeneratorConvention::Calibrated;
    Dynamics dynamics = Dynamics::Secular;

    std::size_t size() const { return times.size(); }
    bool empty() const { return times.empty(); }

    void push(double t, const State& s) {
        if (!times.empty() && !(t > times.back())) throw InvalidParameter("EvolutionSeries: times must increase");
        times.push_back(t);
        states.push_back(s);
        diagnostics.push_back(diagnose(s));
    }
};

using MatrixSeries = EvolutionSeries<CMat4>;
using XSeries = EvolutionSeries<XState>;

inline bool all_finite(const CMat4& m) {
    for (const auto& x : m.m)
        if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) return false;
    return true;
}

inline bool all_finite(const XState& x) {
    return std::isfinite(x.a) && std::isfinite(x.b) && std::isfinite(x.c) && std::isfinite(x.d) &&
           std::isfinite(x.z) && std::isfinite(x.w);
}

template <class State, class Rhs>
State rk4_step(const State& y, double h, Rhs&& f) {
    const State k1 = f(y);
    const State k2 = f(y + (0.5 * h) * k1);
    const State k3 = f(y + (0.5 * h) * k2);
    const State k4 = f(y + h * k3);
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// Validity check for an initial density matrix: Hermitian, unit trace and
/// min eigenvalue >= -tol.
inline void require_density_matrix(const CMat4& rho, const char* who, double tol = 1e-10) {
    require_hermitian(rho, who, tol);
    std::ostringstream os;
    const double tr_dev = std::abs(trace(rho) - 1.0);
    if (!(tr_dev <= tol)) {
        os << who << ": trace deviates from 1 by " << tr_dev;
        throw InvalidParameter(os.str());
    }
    const double lmin = min_eigenvalue(rho);
    if (lmin < -tol) {
        os << who << ": not positive semidefinite (min eigenvalue " << lmin << ")";
        throw InvalidParameter(os.str());
    }
}

struct Rk4Options {
    Dynamics dynamics = Dynamics::Full;
    std::size_t stride = 1;  // keep every stride-th step (the last step is always kept)
};

namespace detail {

inline void require_step(double t_end, double dt, const char* who) {
    if (!std::isfinite(dt) || dt <= 0.0) throw InvalidParameter(std::string(who) + ": dt must be > 0");
    if (!std::isfinite(t_end) || t_end < 0.0) throw InvalidParameter(std::string(who) + ": t_end must be >= 0");
}

/// Uniform grid with spacing <= dt ending exactly at t_end.
inline std::size_t step_count(double t_end, double dt) {
    if (t_end == 0.0) return 0;
    return static_cast<std::size_t>(std::max(1.0, std::ceil(t_end / dt - 1e-9)));
}

template <class State, class Rhs>
EvolutionSeries<State> run_rk4(const State& y0, double t_end, double dt, std::size_t stride, Rhs&& f,
                               const char* who) {
    if (stride == 0) throw InvalidParameter(std::string(who) + ": stride must be >= 1");
    EvolutionSeries<State> series;
    series.push(0.0, y0);
    const std::size_t n = step_count(t_end, dt);
    const double h = n ? t_end / static_cast<double>(n) : 0.0;
    State y = y0;
    for (std::size_t k = 1; k <= n; ++k) {
        y = rk4_step(y, h, f);
        if (!all_finite(y)) {
            std::ostringstream os;
            os << who << ": non-finite state at step " << k << " (t=" << h * static_cast<double>(k) << ")";
            throw NumericalFailure(os.str());
        }
        if (k % stride == 0 || k == n) series.push(h * static_cast<double>(k), y);
    }
    return series;
}

} // namespace detail

/// RK4 on the 4x4 matrix ODE.
inline MatrixSeries rk4_evolve(const CMat4& rho0, const NoiseParams& p, GeneratorConvention conv, double t_end,
                               double dt, Rk4Options opts = {}) {
    require_density_matrix(rho0, "rk4_evolve");
    validate(p);
    detail::require_step(t_end, dt, "rk4_evolve");
    auto rhs = [&](const CMat4& rho) { return generator_apply(p, conv, opts.dynamics, rho); };
    auto s = detail::run_rk4(rho0, t_end, dt, opts.stride, rhs, "rk4_evolve");
    s.convention = conv;
    s.dynamics = opts.dynamics;
    return s;
}

/// RK4 on the secular sector system (gA = gB = gamma).
inline XSeries rk4_evolve_secular(const XState& x0, double gamma, double big_gamma, double t_end, double dt,
                                  std::size_t stride = 1,
                                  GeneratorConvention conv = GeneratorConvention::Calibrated) {
    require_valid(x0, "rk4_evolve_secular");
    if (!std::isfinite(gamma) || gamma < 0.0) throw InvalidParameter("rk4_evolve_secular: gamma must be >= 0");
    detail::require_step(t_end, dt, "rk4_evolve_secular");
    auto rhs = [&](const XState& x) { return secular_rhs(x, gamma, big_gamma, conv); };
    auto s = detail::run_rk4(x0, t_end, dt, stride, rhs, "rk4_evolve_secular");
    s.convention = conv;
    s.dynamics = Dynamics::Secular;
    return s;
}

/// Integrates between consecutive grid points with uniform substeps of at
/// most max_dt; one snapshot per grid time. grid[0] is the initial time.
template <class State, class Rhs>
EvolutionSeries<State> rk4_on_grid(const State& y0, std::span<const double> grid, double max_dt, Rhs&& f) {
    if (grid.empty()) throw InvalidParameter("rk4_on_grid: empty grid");
    if (!(max_dt > 0.0)) throw InvalidParameter("rk4_on_grid: dt must be > 0");
    EvolutionSeries<State> series;
    series.push(grid[0], y0);
    State y = y0;
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double span = grid[i] - grid[i - 1];
        if (!(span > 0.0)) throw InvalidParameter("rk4_on_grid: grid must be strictly increasing");
        const std::size_t n = detail::step_count(span, max_dt);
        const double h = span / static_cast<double>(n);
        for (std::size_t k = 0; k < n; ++k) y = rk4_step(y, h, f);
        if (!all_finite(y)) {
            std::ostringstream os;
            os << "rk4_on_grid: non-finite state at t=" << grid[i];
            throw NumericalFailure(os.str());
        }
        series.push(grid[i], y);
    }
    return series;
}

struct PhysicalityScan {
    double max_trace_deviation = 0.0;
    double max_hermiticity_defect = 0.0;
    double min_eigenvalue = 0.0;
    double t_of_min_eigenvalue = 0.0;
    std::optional<double> first_violation;  // first t with min eigenvalue < -tol
    double tolerance = 0.0;

    bool positivity_ok() const { return !first_violation.has_value(); }
};

template <class State>
PhysicalityScan physicality_scan(const EvolutionSeries<State>& series, double tol = 1e-8) {
    if (series.empty()) throw InvalidParameter("physicality_scan: empty series");
    PhysicalityScan r;
    r.tolerance = tol;
    r.min_eigenvalue = series.diagnostics.front().min_eigenvalue;
    r.t_of_min_eigenvalue = series.times.front();
    for (std::size_t i = 0; i < series.size(); ++i) {
        const auto& d = series.diagnostics[i];
        r.max_trace_deviation = std::max(r.max_trace_deviation, d.trace_deviation);
        r.max_hermiticity_defect = std::max(r.max_hermiticity_defect, d.hermiticity_defect);
        if (d.min_eigenvalue < r.min_eigenvalue) {
            r.min_eigenvalue = d.min_eigenvalue;
            r.t_of_min_eigenvalue = series.times[i];
        }
        if (!r.first_violation && d.min_eigenvalue < -tol) r.first_violation = series.times[i];
    }
    return r;
}

} // namespace corrnoise
