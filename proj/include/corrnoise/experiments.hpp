#pragma once

// Parameter sweeps over the cross-correlation, sudden-death tables, figure
// presets and the cross-method comparison harness.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "corrnoise/analytic.hpp"
#include "corrnoise/entanglement.hpp"
#include "corrnoise/errors.hpp"
#include "corrnoise/integrate.hpp"
#include "corrnoise/model.hpp"
#include "corrnoise/trajectories.hpp"
#include "corrnoise/xstate.hpp"

namespace corrnoise {

enum class Method { Analytic, SecularRk4, FullRk4, Trajectories };

inline std::string_view to_string(Method m) {
    switch (m) {
    case Method::Analytic: return "analytic";
    case Method::SecularRk4: return "secular-rk4";
    case Method::FullRk4: return "full-rk4";
    case Method::Trajectories: return "trajectories";
    }
    return "?";
}

inline Method method_from_string(std::string_view s) {
    for (Method m : {Method::Analytic, Method::SecularRk4, Method::FullRk4, Method::Trajectories})
        if (to_string(m) == s) return m;
    throw InvalidParameter("unknown method '" + std::string(s) + "'");
}

/// Initial state: a tag plus either X parameters, a general matrix, or both.
struct InitialState {
    std::string tag;
    std::optional<XState> x;
    CMat4 matrix;

    static InitialState from_x(std::string tag, const XState& x) { return {std::move(tag), x, to_matrix(x)}; }

    static InitialState from_matrix(std::string tag, const CMat4& m, double x_tol = 1e-14) {
        InitialState s{std::move(tag), std::nullopt, m};
        if (x_form_defect(m) <= x_tol && std::abs(m(2, 1).imag()) <= x_tol && std::abs(m(3, 0).imag()) <= x_tol)
            s.x = XState{m(0, 0).real(), m(1, 1).real(), m(2, 2).real(), m(3, 3).real(), m(2, 1).real(),
                         m(3, 0).real()};
        return s;
    }

    const XState& require_x(const char* who) const {
        if (!x) throw InvalidParameter(std::string(who) + ": initial state '" + tag + "' is not of X form");
        return *x;
    }
};

namespace initial {
inline InitialState bell_phi() { return InitialState::from_x("bell-phi", states::bell_phi()); }
inline InitialState bell_psi() { return InitialState::from_x("bell-psi", states::bell_psi()); }
inline InitialState fig4() { return InitialState::from_x("fig4-x", states::fig4_printed()); }
} // namespace initial

struct SweepOptions {
    double omega = 0.0;
    double dt = 1e-3;
    GeneratorConvention convention = GeneratorConvention::Calibrated;
    std::size_t n_traj = 2000;
    std::uint64_t seed = 1;
    Unraveling unraveling = Unraveling::PhaseRandomized;
    unsigned workers = 0;
    bool allow_unphysical = false;
};

struct SweepCurve {
    double big_gamma = 0.0;
    std::vector<CMat4> states;               // one per grid time
    std::vector<ConcurrencePoint> points;    // one per grid time
};

struct SweepResult {
    std::string initial_tag;
    double gamma = 0.0;
    Method method = Method::Analytic;
    SweepOptions options;
    std::vector<double> times;
    std::vector<SweepCurve> curves;
};

inline std::vector<double> uniform_grid(double t_max, std::size_t points) {
    if (points < 2) throw InvalidParameter("time grid needs at least 2 points");
    if (!(t_max > 0.0)) throw InvalidParameter("time grid: t_max must be > 0");
    std::vector<double> g(points);
    for (std::size_t i = 0; i < points; ++i) g[i] = t_max * static_cast<double>(i) / static_cast<double>(points - 1);
    g.back() = t_max;
    return g;
}

namespace detail {

inline void require_grid(std::span<const double> grid) {
    if (grid.empty()) throw InvalidParameter("time grid is empty");
    if (grid[0] < 0.0) throw InvalidParameter("time grid must start at t >= 0");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1])) throw InvalidParameter("time grid must be strictly increasing");
}

/// The only pure-state path: rank-1 density matrices evolve as vectors.
inline std::optional<CVec4> pure_vector(const CMat4& rho) {
    const auto es = eig_hermitian(rho, 1e-8);
    if (std::abs(es.values[0] - 1.0) > 1e-12) return std::nullopt;
    CVec4 v;
    for (std::size_t i = 0; i < 4; ++i) v[i] = es.vectors(i, 0);
    return v;
}

inline std::vector<CMat4> trajectory_states(const CMat4& rho0, const NoiseParams& p, std::span<const double> grid,
                                            const SweepOptions& o) {
    if (grid[0] != 0.0) throw InvalidParameter("trajectories: time grid must start at 0");
    const double spacing = grid.size() > 1 ? grid[1] - grid[0] : 0.0;
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (std::abs((grid[i] - grid[i - 1]) - spacing) > 1e-9 * std::max(1.0, grid.back()))
            throw InvalidParameter("trajectories: time grid must be uniform");
    std::vector<CMat4> out;
    if (grid.size() == 1) {
        out.push_back(rho0);
        return out;
    }
    const std::size_t sub = step_count(spacing, o.dt);
    TrajectoryConfig cfg;
    cfg.n_traj = o.n_traj;
    cfg.dt = spacing / static_cast<double>(sub);
    cfg.t_end = grid.back();
    cfg.seed = o.seed;
    cfg.params = p;
    cfg.unraveling = o.unraveling;
    cfg.record_every = sub;
    cfg.workers = o.workers;
    const auto series = [&] {
        if (auto psi = pure_vector(rho0)) return ensemble_average(*psi, cfg);
        return ensemble_average(rho0, cfg);
    }();
    if (series.size() != grid.size()) throw NumericalFailure("trajectories: recorded grid does not match request");
    return series.states;
}

inline std::vector<CMat4> method_states(const InitialState& init, double gamma, double big_gamma,
                                        std::span<const double> grid, Method method, const SweepOptions& o) {
    std::vector<CMat4> out;
    out.reserve(grid.size());
    const NoiseParams p = NoiseParams::symmetric(gamma, big_gamma, o.omega);
    switch (method) {
    case Method::Analytic: {
        const XState& x0 = init.require_x("analytic");
        for (double t : grid) out.push_back(to_matrix(analytic::propagate_x(x0, gamma, big_gamma, t)));
        break;
    }
    case Method::SecularRk4: {
        const XState& x0 = init.require_x("secular-rk4");
        require_valid(x0, "secular-rk4");
        std::vector<double> g(grid.begin(), grid.end());
        if (g[0] != 0.0) g.insert(g.begin(), 0.0);
        auto rhs = [&](const XState& x) { return secular_rhs(x, gamma, big_gamma, o.convention); };
        const auto s = rk4_on_grid(x0, std::span<const double>(g), o.dt, rhs);
        for (std::size_t i = g.size() - grid.size(); i < s.size(); ++i) out.push_back(to_matrix(s.states[i]));
        break;
    }
    case Method::FullRk4: {
        require_density_matrix(init.matrix, "full-rk4");
        std::vector<double> g(grid.begin(), grid.end());
        if (g[0] != 0.0) g.insert(g.begin(), 0.0);
        auto rhs = [&](const CMat4& r) { return generator_apply(p, o.convention, Dynamics::Full, r); };
        const auto s = rk4_on_grid(init.matrix, std::span<const double>(g), o.dt, rhs);
        for (std::size_t i = g.size() - grid.size(); i < s.size(); ++i) out.push_back(s.states[i]);
        break;
    }
    case Method::Trajectories:
        require_density_matrix(init.matrix, "trajectories");
        out = trajectory_states(init.matrix, p, grid, o);
        break;
    }
    return out;
}

} // namespace detail

/// Concurrence series for each cross-correlation value on one shared grid.
/// X-form results use the fast path; general matrices the Wootters route.
inline SweepResult sweep_concurrence(const InitialState& init, double gamma, std::span<const double> big_gammas,
                                     std::span<const double> t_grid, Method method, const SweepOptions& o = {}) {
    detail::require_grid(t_grid);
    if (big_gammas.empty()) throw InvalidParameter("sweep: empty big_gamma list");
    for (double g : big_gammas) require_physical(NoiseParams::symmetric(gamma, g, o.omega), o.allow_unphysical);

    SweepResult r;
    r.initial_tag = init.tag;
    r.gamma = gamma;
    r.method = method;
    r.options = o;
    r.times.assign(t_grid.begin(), t_grid.end());
    for (double g : big_gammas) {
        SweepCurve c;
        c.big_gamma = g;
        c.states = detail::method_states(init, gamma, g, t_grid, method, o);
        c.points.reserve(c.states.size());
        const bool x_path = method == Method::Analytic || method == Method::SecularRk4;
        for (std::size_t i = 0; i < c.states.size(); ++i) {
            const double t = t_grid[i];
            c.points.push_back(x_path ? concurrence_x(x_from_matrix(c.states[i]), t)
                                      : concurrence_point(c.states[i], t));
        }
        r.curves.push_back(std::move(c));
    }
    return r;
}

inline std::vector<ConcurrencePoint> analytic_concurrence_series(const XState& x0, double gamma, double big_gamma,
                                                                 std::span<const double> grid) {
    std::vector<ConcurrencePoint> out;
    out.reserve(grid.size());
    for (double t : grid) out.push_back(concurrence_x(analytic::propagate_x(x0, gamma, big_gamma, t), t));
    return out;
}

struct EsdRow {
    double big_gamma = 0.0;
    std::vector<Crossing> crossings;
};

/// Death/revival times per cross-correlation from the closed forms, scanned
/// over [0, t_max] (default 2/gamma).
inline std::vector<EsdRow> esd_table(const XState& x0, double gamma, std::span<const double> big_gammas,
                                     std::optional<double> t_max = std::nullopt, std::size_t grid_points = 2000) {
    const double horizon = t_max ? *t_max : (gamma > 0.0 ? 2.0 / gamma : 2.0);
    std::vector<EsdRow> rows;
    for (double g : big_gammas) {
        require_physical(NoiseParams::symmetric(gamma, g));
        auto curve = [&](double t) { return concurrence_x(analytic::propagate_x(x0, gamma, g, t)).value; };
        rows.push_back({g, esd_time(curve, horizon, grid_points)});
    }
    return rows;
}

struct FigurePreset {
    int id = 2;
    InitialState initial;
    double gamma = 1.0;
    std::vector<double> big_gammas;
    std::vector<double> grid;
};

/// Reproduction settings: gamma = 1, G in {0, .25, .5, .75, 1}, t in [0, 2]
/// on 2000 points.
inline FigurePreset figure_preset(int id) {
    FigurePreset f;
    f.id = id;
    switch (id) {
    case 2: f.initial = initial::bell_phi(); break;
    case 3: f.initial = initial::bell_psi(); break;
    case 4: f.initial = initial::fig4(); break;
    default: throw InvalidParameter("figure id must be 2, 3 or 4");
    }
    f.big_gammas = {0.0, 0.25, 0.5, 0.75, 1.0};
    f.grid = uniform_grid(2.0, 2000);
    return f;
}

// ---------------------------------------------------------------------------
// Cross-method comparison

/// H_S rotation removed: e^{iHt} rho e^{-iHt}. Only rho_14 / rho_41 (and the
/// other off-X coherences) carry phases.
inline CMat4 to_rotating_frame(const CMat4& rho, double omega, double t) {
    if (omega == 0.0) return rho;
    static constexpr std::array<double, 4> energy{1.0, 0.0, 0.0, -1.0};  // eigenvalues of (ZA+ZB)/2
    CMat4 r;
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j)
            r(i, j) = rho(i, j) * std::polar(1.0, omega * t * (energy[i] - energy[j]));
    return r;
}

/// Max abs difference over (diagonals, |rho_23|, |rho_14|).
inline double observable_deviation(const CMat4& l, const CMat4& r) {
    double d = 0.0;
    for (std::size_t i = 0; i < 4; ++i) d = std::max(d, std::abs(l(i, i).real() - r(i, i).real()));
    d = std::max(d, std::abs(std::abs(l(1, 2)) - std::abs(r(1, 2))));
    d = std::max(d, std::abs(std::abs(l(0, 3)) - std::abs(r(0, 3))));
    return d;
}

struct PairDeviation {
    Method first = Method::Analytic;
    Method second = Method::Analytic;
    double max_abs_deviation = 0.0;  // observable_deviation
    double time_of_max = 0.0;
    double max_frobenius = 0.0;      // rotating frame
    double time_of_max_frobenius = 0.0;
    std::vector<double> per_time;    // observable_deviation at each grid time
};

struct ComparisonReport {
    std::string initial_tag;
    NoiseParams params;
    SweepOptions options;
    std::vector<double> times;
    std::vector<Method> methods;
    std::vector<PairDeviation> pairs;

    const PairDeviation* find(Method a, Method b) const {
        for (const auto& p : pairs)
            if ((p.first == a && p.second == b) || (p.first == b && p.second == a)) return &p;
        return nullptr;
    }
};

/// Runs every requested method on one grid and reports pairwise deviations.
/// Methods needing an X-form or PSD initial state are skipped when it is not.
inline ComparisonReport compare_methods(const InitialState& init, double gamma, double big_gamma,
                                        std::span<const double> grid, const SweepOptions& o = {},
                                        std::vector<Method> methods = {Method::Analytic, Method::SecularRk4,
                                                                       Method::FullRk4, Method::Trajectories}) {
    detail::require_grid(grid);
    require_physical(NoiseParams::symmetric(gamma, big_gamma, o.omega), o.allow_unphysical);
    ComparisonReport rep;
    rep.initial_tag = init.tag;
    rep.params = NoiseParams::symmetric(gamma, big_gamma, o.omega);
    rep.options = o;
    rep.times.assign(grid.begin(), grid.end());

    std::vector<std::vector<CMat4>> runs;
    for (Method m : methods) {
        const bool needs_x = m == Method::Analytic || m == Method::SecularRk4;
        if (needs_x && !init.x) continue;
        auto states = detail::method_states(init, gamma, big_gamma, grid, m, o);
        if (!needs_x)
            for (std::size_t i = 0; i < states.size(); ++i) states[i] = to_rotating_frame(states[i], o.omega, grid[i]);
        rep.methods.push_back(m);
        runs.push_back(std::move(states));
    }
    for (std::size_t i = 0; i < runs.size(); ++i)
        for (std::size_t j = i + 1; j < runs.size(); ++j) {
            PairDeviation pd;
            pd.first = rep.methods[i];
            pd.second = rep.methods[j];
            pd.per_time.reserve(grid.size());
            for (std::size_t k = 0; k < grid.size(); ++k) {
                const double dev = observable_deviation(runs[i][k], runs[j][k]);
                const double fro = frobenius(runs[i][k] - runs[j][k]);
                pd.per_time.push_back(dev);
                if (dev > pd.max_abs_deviation) {
                    pd.max_abs_deviation = dev;
                    pd.time_of_max = grid[k];
                }
                if (fro > pd.max_frobenius) {
                    pd.max_frobenius = fro;
                    pd.time_of_max_frobenius = grid[k];
                }
            }
            rep.pairs.push_back(std::move(pd));
        }
    return rep;
}

} // namespace corrnoise
