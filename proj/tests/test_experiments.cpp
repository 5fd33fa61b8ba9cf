#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "corrnoise/experiments.hpp"
#include "test_util.hpp"

using namespace corrnoise;

namespace {

const std::vector<double> kGammas{0.0, 0.25, 0.5, 0.75, 1.0};

} // namespace

TEST(UniformGrid, EndpointsAndSpacing) {
    const auto g = uniform_grid(2.0, 5);
    EXPECT_EQ(g, (std::vector<double>{0.0, 0.5, 1.0, 1.5, 2.0}));
    EXPECT_THROW(uniform_grid(2.0, 1), InvalidParameter);
    EXPECT_THROW(uniform_grid(0.0, 5), InvalidParameter);
}

TEST(Sweep, AnalyticBellPhiValues) {
    const std::vector<double> grid{0.0, 0.25};
    const std::vector<double> gs{0.0, 1.0};
    const auto r = sweep_concurrence(initial::bell_phi(), 1.0, gs, grid, Method::Analytic);
    ASSERT_EQ(r.curves.size(), 2u);
    EXPECT_NEAR(r.curves[0].points[0].value, 1.0, 1e-15);
    EXPECT_NEAR(r.curves[0].points[1].value, 0.0, 1e-15);
    EXPECT_NEAR(r.curves[1].points[1].value, 0.05114179729406365, 1e-12);
    EXPECT_EQ(r.initial_tag, "bell-phi");
}

TEST(Sweep, SecularRk4MatchesAnalytic) {
    const auto grid = uniform_grid(2.0, 41);
    for (const auto& init : {initial::bell_phi(), initial::bell_psi()}) {
        const auto a = sweep_concurrence(init, 1.0, kGammas, grid, Method::Analytic);
        const auto b = sweep_concurrence(init, 1.0, kGammas, grid, Method::SecularRk4);
        for (std::size_t c = 0; c < kGammas.size(); ++c)
            for (std::size_t i = 0; i < grid.size(); ++i)
                EXPECT_NEAR(a.curves[c].points[i].value, b.curves[c].points[i].value, 1e-8);
    }
}

TEST(Sweep, FullRk4ProducesValidConcurrence) {
    const auto grid = uniform_grid(1.0, 21);
    SweepOptions o;
    o.omega = 3.0;
    const auto r = sweep_concurrence(initial::bell_psi(), 1.0, kGammas, grid, Method::FullRk4, o);
    for (const auto& c : r.curves) {
        EXPECT_NEAR(c.points[0].value, 1.0, 1e-10);
        for (const auto& p : c.points) {
            EXPECT_GE(p.value, 0.0);
            EXPECT_LE(p.value, 1.0);
        }
    }
}

TEST(Sweep, TrajectoriesNeedUniformGridFromZero) {
    SweepOptions o;
    o.n_traj = 8;
    const std::vector<double> gs{0.5};
    const std::vector<double> uneven{0.0, 0.1, 0.3};
    EXPECT_THROW(sweep_concurrence(initial::bell_phi(), 1.0, gs, uneven, Method::Trajectories, o), InvalidParameter);
    const std::vector<double> late{0.1, 0.2, 0.3};
    EXPECT_THROW(sweep_concurrence(initial::bell_phi(), 1.0, gs, late, Method::Trajectories, o), InvalidParameter);
    const auto r = sweep_concurrence(initial::bell_phi(), 1.0, gs, uniform_grid(0.3, 4), Method::Trajectories, o);
    EXPECT_EQ(r.curves[0].points.size(), 4u);
}

TEST(Sweep, RejectsUnphysicalUnlessAllowed) {
    const std::vector<double> gs{1.5};
    const auto grid = uniform_grid(0.5, 6);
    EXPECT_THROW(sweep_concurrence(initial::bell_phi(), 1.0, gs, grid, Method::Analytic), InvalidParameter);
    SweepOptions o;
    o.allow_unphysical = true;
    EXPECT_NO_THROW(sweep_concurrence(initial::bell_phi(), 1.0, gs, grid, Method::Analytic, o));
    EXPECT_THROW(sweep_concurrence(initial::bell_phi(), 1.0, std::vector<double>{}, grid, Method::Analytic),
                 InvalidParameter);
}

TEST(Sweep, XOnlyMethodsRejectGeneralStates) {
    CMat4 m = 0.25 * CMat4::identity();
    m(0, 1) = 0.1;
    m(1, 0) = 0.1;
    const auto init = InitialState::from_matrix("file", m);
    EXPECT_FALSE(init.x.has_value());
    const std::vector<double> gs{0.5};
    EXPECT_THROW(sweep_concurrence(init, 1.0, gs, uniform_grid(0.5, 6), Method::Analytic), InvalidParameter);
    EXPECT_NO_THROW(sweep_concurrence(init, 1.0, gs, uniform_grid(0.5, 6), Method::FullRk4));
}

TEST(EsdTable, BellPhiDeathIsDelayedByCorrelation) {
    const auto rows = esd_table(states::bell_phi(), 1.0, kGammas);
    ASSERT_EQ(rows.size(), 5u);
    double prev = 0.0;
    for (const auto& r : rows) {
        const auto d = death_times(r.crossings);
        ASSERT_EQ(d.size(), 1u);
        EXPECT_GT(d[0], prev);
        prev = d[0];
    }
    EXPECT_NEAR(prev, 0.28315706589188594, 1e-9);
}

TEST(EsdTable, UncorrelatedBellStatesDieTogether) {
    const std::vector<double> zero{0.0};
    const auto phi = esd_table(states::bell_phi(), 1.0, zero);
    const auto psi = esd_table(states::bell_psi(), 1.0, zero);
    EXPECT_NEAR(phi[0].crossings[0].t, psi[0].crossings[0].t, 1e-9);
}

TEST(EsdTable, ScalesInverselyWithGamma) {
    const std::vector<double> g1{0.5};
    const std::vector<double> g3{1.5};
    const auto a = esd_table(states::bell_phi(), 1.0, g1);
    const auto b = esd_table(states::bell_phi(), 3.0, g3);
    EXPECT_NEAR(b[0].crossings[0].t, a[0].crossings[0].t / 3.0, 1e-9);
}

TEST(Scaling, ConcurrenceDependsOnGammaTimesT) {
    for (double s : {0.5, 2.0, 7.0})
        for (double g : {0.0, 0.4, 1.0})
            for (double t : {0.05, 0.2, 0.9}) {
                const double c1 = concurrence_x(analytic::propagate_x(states::bell_psi(), 1.0, g, t)).value;
                const double c2 = concurrence_x(analytic::propagate_x(states::bell_psi(), s, s * g, t / s)).value;
                EXPECT_NEAR(c1, c2, 1e-13);
            }
}

TEST(Figures, BellPhiCorrelationNeverHurts) {
    const auto p = figure_preset(2);
    const auto r = sweep_concurrence(p.initial, p.gamma, p.big_gammas, p.grid, Method::Analytic);
    for (std::size_t c = 1; c < r.curves.size(); ++c)
        for (std::size_t i = 0; i < p.grid.size(); ++i)
            EXPECT_GE(r.curves[c].points[i].value, r.curves[c - 1].points[i].value - 1e-14);
}

TEST(Figures, BellPsiCorrelationSpeedsDecay) {
    const auto p = figure_preset(3);
    const auto r = sweep_concurrence(p.initial, p.gamma, p.big_gammas, p.grid, Method::Analytic);
    for (std::size_t c = 1; c < r.curves.size(); ++c)
        for (std::size_t i = 1; i < p.grid.size(); ++i)
            EXPECT_LE(r.curves[c].points[i].value, r.curves[c - 1].points[i].value + 1e-14);
}

TEST(Figures, ThirdPresetStateShowsNoReductionOrCrossover) {
    // Pins the behaviour of the preset state, which is not positive
    // semidefinite (min eigenvalue -1/3): correlation only enhances C, and
    // the branches tie at t = 0 with no later switch.
    EXPECT_NEAR(min_eigenvalue(to_matrix(states::fig4_printed())), -1.0 / 3.0, 1e-12);
    const auto p = figure_preset(4);
    const auto r = sweep_concurrence(p.initial, p.gamma, p.big_gammas, p.grid, Method::Analytic);
    const auto& none = r.curves.front().points;
    const auto& full = r.curves.back().points;
    for (std::size_t i = 0; i < p.grid.size(); ++i) EXPECT_GE(full[i].value, none[i].value - 1e-14);
    EXPECT_NEAR(full[0].branch_z, full[0].branch_w, 1e-15);
    for (const auto& c : r.curves) EXPECT_TRUE(dominance_crossover(c.points).empty());
}

TEST(Figures, Presets) {
    for (int id : {2, 3, 4}) {
        const auto p = figure_preset(id);
        EXPECT_EQ(p.big_gammas, kGammas);
        EXPECT_EQ(p.grid.size(), 2000u);
        EXPECT_EQ(p.grid.back(), 2.0);
        EXPECT_EQ(p.gamma, 1.0);
    }
    EXPECT_THROW(figure_preset(5), InvalidParameter);
}

TEST(RotatingFrame, OnlyCoherencesRotate) {
    const CMat4 rho = corrnoise::testing::random_density();
    const CMat4 r = to_rotating_frame(rho, 3.0, 0.7);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(r(i, i), rho(i, i));
    EXPECT_EQ(r(1, 2), rho(1, 2));
    EXPECT_NEAR(std::abs(r(0, 3) - rho(0, 3) * std::polar(1.0, 2.0 * 3.0 * 0.7)), 0.0, 1e-15);
    EXPECT_LE(max_abs(to_rotating_frame(r, -3.0, 0.7) - rho), 1e-15);
}

TEST(CompareMethods, DeterministicPairs) {
    const auto grid = uniform_grid(1.0, 11);
    SweepOptions o;
    const auto rep = compare_methods(initial::bell_phi(), 1.0, 0.5, grid, o,
                                     {Method::Analytic, Method::SecularRk4, Method::FullRk4});
    ASSERT_EQ(rep.pairs.size(), 3u);
    EXPECT_LT(rep.find(Method::Analytic, Method::SecularRk4)->max_abs_deviation, 1e-8);
    // At omega = 0 nothing suppresses the counter-rotating couplings.
    const auto* full = rep.find(Method::Analytic, Method::FullRk4);
    ASSERT_NE(full, nullptr);
    EXPECT_GT(full->max_frobenius, 0.3);
    EXPECT_EQ(rep.find(Method::Trajectories, Method::Analytic), nullptr);
}

TEST(CompareMethods, LargeOmegaApproachesSecular) {
    const auto grid = uniform_grid(0.5, 11);
    SweepOptions o;
    o.omega = 250.0;
    o.dt = 1e-4;
    const auto rep = compare_methods(initial::bell_phi(), 1.0, 0.5, grid, o, {Method::Analytic, Method::FullRk4});
    EXPECT_LT(rep.pairs.at(0).max_frobenius, 0.01);
}

TEST(CompareMethods, SkipsClosedFormsForGeneralStates) {
    CMat4 m = 0.25 * CMat4::identity();
    m(0, 2) = 0.1;
    m(2, 0) = 0.1;
    const auto rep = compare_methods(InitialState::from_matrix("file", m), 1.0, 0.5, uniform_grid(0.2, 3), {},
                                     {Method::Analytic, Method::FullRk4});
    EXPECT_EQ(rep.methods.size(), 1u);
    EXPECT_TRUE(rep.pairs.empty());
}
