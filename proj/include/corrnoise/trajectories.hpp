#pragma once

// Monte Carlo unraveling: every trajectory is a random unitary evolution
// driven by correlated Gaussian increments with covariance
// 2 [[gA, G], [G, gB]] dt. The ensemble mean converges to the Calibrated
// generator.
//
// Two unravelings are provided:
//   Literal          U = exp(-i (H_S dt + dWa XA + dWb XB)); mean -> full generator.
//   PhaseRandomized  the noise couples through cos(th) X - sin(th) Y with a
//                    fresh phase th per step shared by both qubits (rotating
//                    frame); mean -> secular generator, i.e. the closed forms.
//
// The step generator is a sum of commuting single-qubit terms, so the
// exponential factorizes exactly into U_A (x) U_B.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <numbers>
#include <random>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "corrnoise/errors.hpp"
#include "corrnoise/integrate.hpp"
#include "corrnoise/linalg.hpp"
#include "corrnoise/model.hpp"

namespace corrnoise {

enum class Unraveling { Literal, PhaseRandomized };

inline std::string_view to_string(Unraveling u) {
    return u == Unraveling::Literal ? "literal" : "phase-randomized";
}

inline Unraveling unraveling_from_string(std::string_view s) {
    if (s == "literal") return Unraveling::Literal;
    if (s == "phase-randomized") return Unraveling::PhaseRandomized;
    throw InvalidParameter("unknown unraveling '" + std::string(s) + "'");
}

struct TrajectoryConfig {
    std::size_t n_traj = 1000;
    double dt = 1e-3;
    double t_end = 1.0;
    std::uint64_t seed = 1;
    NoiseParams params;
    Unraveling unraveling = Unraveling::PhaseRandomized;
    std::size_t record_every = 1;  // steps between snapshots (last step always recorded)
    unsigned workers = 0;          // 0: hardware concurrency
};

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Per-trajectory random stream; fully determined by (master seed, index).
class NoiseStream {
public:
    NoiseStream(std::uint64_t seed, std::uint64_t index)
        : engine_(splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL))) {}

    double normal() { return normal_(engine_); }

    /// Uniform in [0, 1) from the top 53 bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

struct Increment {
    double dw_a = 0.0;
    double dw_b = 0.0;
};

/// Cholesky factor of the increment covariance for one step, written as
/// dWa = sa z1, dWb = sb (r z1 + sqrt(1 - r^2) z2).
struct IncrementFactor {
    double sa = 0.0;
    double sb = 0.0;
    double corr = 0.0;
    double corr_perp = 1.0;

    static IncrementFactor make(const NoiseParams& p, double dt) {
        const auto rep = validate(p);
        if (!rep.covariance_psd)
            throw InvalidParameter("noise covariance is not positive semidefinite (|big_gamma| > sqrt(gamma_a*gamma_b))");
        if (!(dt > 0.0)) throw InvalidParameter("increment: dt must be > 0");
        IncrementFactor f;
        f.sa = std::sqrt(2.0 * p.gamma_a * dt);
        f.sb = std::sqrt(2.0 * p.gamma_b * dt);
        if (rep.bound > 0.0) f.corr = std::clamp(p.big_gamma / rep.bound, -1.0, 1.0);
        f.corr_perp = std::sqrt(std::max(0.0, 1.0 - f.corr * f.corr));
        return f;
    }
};

inline Increment sample_increment(NoiseStream& stream, const IncrementFactor& f) {
    const double z1 = stream.normal();
    const double z2 = stream.normal();
    return {f.sa * z1, f.sb * (f.corr * z1 + f.corr_perp * z2)};
}

inline Increment sample_increment(NoiseStream& stream, const NoiseParams& p, double dt) {
    return sample_increment(stream, IncrementFactor::make(p, dt));
}

/// exp(-i (vx X + vy Y + vz Z)) = cos|v| I - i sin|v| (v.sigma)/|v|
inline CMat2 su2_exp(double vx, double vy, double vz) {
    const double n = std::sqrt(vx * vx + vy * vy + vz * vz);
    const double c = std::cos(n);
    const double s = n > 0.0 ? std::sin(n) / n : 1.0;
    CMat2 u;
    u(0, 0) = cplx{c, -s * vz};
    u(1, 1) = cplx{c, s * vz};
    u(0, 1) = cplx{-s * vy, -s * vx};
    u(1, 0) = cplx{s * vy, -s * vx};
    return u;
}

/// One step's unitary U_A (x) U_B.
inline CMat4 step_unitary(const Increment& inc, double omega_dt, double phase) {
    const double c = std::cos(phase);
    const double s = std::sin(phase);
    const CMat2 ua = su2_exp(inc.dw_a * c, -inc.dw_a * s, 0.5 * omega_dt);
    const CMat2 ub = su2_exp(inc.dw_b * c, -inc.dw_b * s, 0.5 * omega_dt);
    return kron(ua, ub);
}

namespace detail {

inline void require_config(const TrajectoryConfig& cfg) {
    if (cfg.n_traj < 1) throw InvalidParameter("trajectories: n_traj must be >= 1");
    if (!std::isfinite(cfg.dt) || cfg.dt <= 0.0) throw InvalidParameter("trajectories: dt must be > 0");
    if (!std::isfinite(cfg.t_end) || cfg.t_end < 0.0) throw InvalidParameter("trajectories: t_end must be >= 0");
    if (cfg.record_every < 1) throw InvalidParameter("trajectories: record_every must be >= 1");
}

struct StepPlan {
    std::size_t steps = 0;
    double h = 0.0;
    std::vector<std::size_t> record_steps;  // step indices kept, starting with 0
};

inline StepPlan plan_steps(const TrajectoryConfig& cfg) {
    StepPlan p;
    p.steps = step_count(cfg.t_end, cfg.dt);
    p.h = p.steps ? cfg.t_end / static_cast<double>(p.steps) : 0.0;
    p.record_steps.push_back(0);
    for (std::size_t k = 1; k <= p.steps; ++k)
        if (k % cfg.record_every == 0 || k == p.steps) p.record_steps.push_back(k);
    return p;
}

inline CVec4 apply(const CMat4& u, const CVec4& psi) { return u * psi; }
inline CMat4 apply(const CMat4& u, const CMat4& rho) { return u * rho * dagger(u); }

inline CMat4 as_density(const CVec4& psi) { return outer(psi, psi); }
inline const CMat4& as_density(const CMat4& rho) { return rho; }

inline bool finite_state(const CVec4& psi) {
    for (const auto& x : psi.v)
        if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) return false;
    return true;
}
inline bool finite_state(const CMat4& rho) { return all_finite(rho); }

/// Runs one trajectory and hands (record slot, state) to `sink`.
template <class State, class Sink>
void run_trajectory(const State& s0, const TrajectoryConfig& cfg, const StepPlan& plan, const IncrementFactor& f,
                    NoiseStream& stream, Sink&& sink) {
    State s = s0;
    std::size_t slot = 0;
    sink(slot++, s);
    const double omega_dt = cfg.params.omega * plan.h;
    for (std::size_t k = 1; k <= plan.steps; ++k) {
        const Increment inc = sample_increment(stream, f);
        const double phase =
            cfg.unraveling == Unraveling::PhaseRandomized ? 2.0 * std::numbers::pi * stream.uniform() : 0.0;
        s = apply(step_unitary(inc, omega_dt, phase), s);
        if (slot < plan.record_steps.size() && plan.record_steps[slot] == k) {
            if (!finite_state(s)) throw NumericalFailure("trajectory: non-finite state at step " + std::to_string(k));
            sink(slot++, s);
        }
    }
}

} // namespace detail

template <class State>
struct Trajectory {
    std::vector<double> times;
    std::vector<State> states;
};

/// A single trajectory from a pure state or a density matrix.
template <class State>
Trajectory<State> evolve_trajectory(const State& s0, const TrajectoryConfig& cfg, NoiseStream& stream) {
    detail::require_config(cfg);
    const auto plan = detail::plan_steps(cfg);
    const auto f = IncrementFactor::make(cfg.params, plan.h > 0.0 ? plan.h : cfg.dt);
    Trajectory<State> tr;
    tr.times.reserve(plan.record_steps.size());
    tr.states.reserve(plan.record_steps.size());
    detail::run_trajectory(s0, cfg, plan, f, stream, [&](std::size_t slot, const State& s) {
        tr.times.push_back(plan.h * static_cast<double>(plan.record_steps[slot]));
        tr.states.push_back(s);
    });
    return tr;
}

/// Mean of n_traj trajectory density matrices at every recorded time.
///
/// Trajectories are grouped in fixed blocks; each block is summed in index
/// order and block sums are combined in block order, so the result is
/// bit-identical for any worker count.
template <class State>
MatrixSeries ensemble_average(const State& s0, const TrajectoryConfig& cfg) {
    detail::require_config(cfg);
    const auto plan = detail::plan_steps(cfg);
    const auto f = IncrementFactor::make(cfg.params, plan.h > 0.0 ? plan.h : cfg.dt);
    const std::size_t n_rec = plan.record_steps.size();

    constexpr std::size_t block = 128;
    const std::size_t n_blocks = (cfg.n_traj + block - 1) / block;
    std::vector<std::vector<CMat4>> partial(n_blocks, std::vector<CMat4>(n_rec));

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    auto worker = [&] {
        try {
            for (std::size_t b = next++; b < n_blocks && !failed; b = next++) {
                auto& acc = partial[b];
                const std::size_t end = std::min(cfg.n_traj, (b + 1) * block);
                for (std::size_t i = b * block; i < end; ++i) {
                    NoiseStream stream(cfg.seed, i);
                    detail::run_trajectory(s0, cfg, plan, f, stream, [&](std::size_t slot, const State& s) {
                        acc[slot] += detail::as_density(s);
                    });
                }
            }
        } catch (...) {
            if (!failed.exchange(true)) failure = std::current_exception();
        }
    };

    unsigned n_workers = cfg.workers ? cfg.workers : std::max(1u, std::thread::hardware_concurrency());
    n_workers = static_cast<unsigned>(std::min<std::size_t>(n_workers, n_blocks));
    if (n_workers <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(n_workers);
        for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);

    MatrixSeries out;
    out.convention = GeneratorConvention::Calibrated;
    out.dynamics = cfg.unraveling == Unraveling::Literal ? Dynamics::Full : Dynamics::Secular;
    const double inv_n = 1.0 / static_cast<double>(cfg.n_traj);
    for (std::size_t r = 0; r < n_rec; ++r) {
        CMat4 sum;
        for (std::size_t b = 0; b < n_blocks; ++b) sum += partial[b][r];
        out.push(plan.h * static_cast<double>(plan.record_steps[r]), sum * inv_n);
    }
    return out;
}

} // namespace corrnoise
