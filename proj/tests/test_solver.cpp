#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "test_util.hpp"

using namespace sqg;
using sqg::testing::benchmark;
using sqg::testing::max_abs_diff;

namespace {

struct Mode {
    int k1, k2;
    double amp, phase;
};

/// u.grad(theta) for a sum of a cos(k.x + phase), evaluated pointwise from the
/// closed forms R_j cos(k.x) = (k_j/|k|) sin(k.x) and d_j cos(k.x) = -k_j sin(k.x).
ScalarField advection_oracle(const TorusGrid& g, const std::vector<Mode>& modes) {
    return ScalarField::sample(g, [&](double x1, double x2) {
        double r1 = 0, r2 = 0, d1 = 0, d2 = 0;
        for (const auto& m : modes) {
            const double s = m.amp * std::sin(m.k1 * x1 + m.k2 * x2 + m.phase);
            const double norm = std::hypot(m.k1, m.k2);
            r1 += m.k1 / norm * s;
            r2 += m.k2 / norm * s;
            d1 -= m.k1 * s;
            d2 -= m.k2 * s;
        }
        return -r2 * d1 + r1 * d2;
    });
}

ScalarField modes_field(const TorusGrid& g, const std::vector<Mode>& modes) {
    return ScalarField::sample(g, [&](double x1, double x2) {
        double v = 0;
        for (const auto& m : modes) v += m.amp * std::cos(m.k1 * x1 + m.k2 * x2 + m.phase);
        return v;
    });
}

SolverConfig fixed_step(double dt, double t_end) {
    SolverConfig c;
    c.cfl = 1.0;
    c.dt_max = dt;
    c.t_end = t_end;
    return c;
}

}  // namespace

TEST(SolverConfig, RejectsOutOfRangeSettings) {
    SolverConfig c;
    EXPECT_NO_THROW(c.validate());
    c.alpha = -0.1;
    EXPECT_THROW(c.validate(), InvalidArgument);
    c = {};
    c.cfl = 1.5;
    EXPECT_THROW(c.validate(), InvalidArgument);
    c = {};
    c.t_end = 0;
    EXPECT_THROW(c.validate(), InvalidArgument);
}

TEST(NonlinearTerm, VanishingCases) {
    const TorusGrid g(32);
    for (auto sign : {AdvectionSign::paper, AdvectionSign::standard}) {
        EXPECT_EQ(from_spectral(nonlinear_term(to_spectral(ScalarField::sample(g, [](double, double) { return 3.0; })), sign))
                      .sup_norm(),
                  0.0);
        EXPECT_LT(from_spectral(nonlinear_term(to_spectral(ScalarField::sample(g, [](double x, double) { return std::sin(x); })), sign))
                      .sup_norm(),
                  1e-14);
        EXPECT_LT(from_spectral(nonlinear_term(
                      to_spectral(ScalarField::sample(g, [](double x, double y) { return std::sin(x) + std::cos(y); })), sign))
                      .sup_norm(),
                  1e-14);
    }
}

TEST(NonlinearTerm, SeparableSums) {
    // theta = f(x1) + g(x2) with single modes of wavenumbers k and m gives
    // u.grad(theta) = f'(x1) g'(x2) (1/|m| - 1/|k|): zero only when |k| = |m|.
    const TorusGrid g(32);
    const std::vector<Mode> equal = {{3, 0, 0.7, 0.3}, {0, -3, -0.4, 1.1}};
    EXPECT_LT(advection_oracle(g, equal).sup_norm(), 1e-14);
    EXPECT_LT(from_spectral(nonlinear_term(to_spectral(modes_field(g, equal)), AdvectionSign::paper)).sup_norm(), 1e-13);

    const std::vector<Mode> unequal = {{1, 0, 1.0, 0.0}, {0, 2, 1.0, 0.0}};
    const ScalarField oracle = advection_oracle(g, unequal);
    const ScalarField closed = ScalarField::sample(g, [](double x1, double x2) {
        return -std::sin(x1) * -2.0 * std::sin(2 * x2) * (0.5 - 1.0);
    });
    EXPECT_LT(max_abs_diff(oracle, closed), 1e-14);
    EXPECT_LT(max_abs_diff(from_spectral(nonlinear_term(to_spectral(modes_field(g, unequal)), AdvectionSign::paper)), oracle),
              1e-13);
}

TEST(NonlinearTerm, MatchesPointwiseOracle) {
    const TorusGrid g(32);
    const std::vector<Mode> modes = {{1, 1, 0.5, 0.0}, {1, -1, -0.5, 0.0}, {0, 1, 1.0, 0.0}, {2, 1, 0.3, 0.7}};
    const ScalarField oracle = advection_oracle(g, modes);
    ASSERT_GT(oracle.sup_norm(), 0.1);
    const SpectralField F = to_spectral(modes_field(g, modes));
    EXPECT_LT(max_abs_diff(from_spectral(nonlinear_term(F, AdvectionSign::paper)), oracle), 1e-13);
    EXPECT_LT(max_abs_diff(from_spectral(nonlinear_term(F, AdvectionSign::standard)), -1.0 * oracle), 1e-13);
}

TEST(Step, ZeroStaysZero) {
    const SpectralField zero(TorusGrid(16));
    EXPECT_EQ(step(zero, 0.1, SolverConfig{}).max_abs(), 0.0);
    EXPECT_THROW(step(zero, 0.0, SolverConfig{}), InvalidArgument);
}

TEST(Step, PureDissipationIsExact) {
    const TorusGrid g(16);
    const ScalarField c = ScalarField::sample(g, [](double x, double) { return std::cos(x); });
    SolverConfig cfg;
    cfg.nonlinear_enabled = false;
    for (double dt : {1e-3, 0.1, 0.7, 3.0}) {
        const ScalarField out = from_spectral(step(to_spectral(c), dt, cfg));
        EXPECT_LT(max_abs_diff(out, std::exp(-dt) * c), 1e-15) << "dt=" << dt;
    }
}

TEST(Step, LocalErrorShrinksLikeFifthPower) {
    // One step against two half steps. At dt = 1e-3 the difference is at
    // round-off, so the ratio is measured at dt = 0.025 -> 0.0125.
    const TorusGrid g(64);
    const SpectralField F = dealias(to_spectral(benchmark(g)));
    const SolverConfig cfg;
    auto local = [&](double dt) { return max_abs_diff(step(F, dt, cfg), step(step(F, dt / 2, cfg), dt / 2, cfg)); };
    const double ratio = local(0.025) / local(0.0125);
    EXPECT_NEAR(ratio, 32.0, 3.2);
}

TEST(Step, NonFiniteStateAborts) {
    const TorusGrid g(16);
    const ScalarField huge = ScalarField::sample(g, [](double x, double y) { return 1e300 * std::sin(x) * std::sin(y); });
    EXPECT_THROW(step(to_spectral(huge), 0.1, SolverConfig{}), BlowUp);
}

TEST(Run, ZeroInitialDataStaysZero) {
    SolverConfig cfg;
    cfg.t_end = 0.5;
    const Trajectory tr = run(ScalarField(TorusGrid(16)), cfg);
    ASSERT_TRUE(tr.completed());
    for (const auto& r : tr.diagnostics) {
        EXPECT_EQ(r.sup_theta, 0.0);
        EXPECT_EQ(r.sup_grad, 0.0);
        EXPECT_EQ(r.l2, 0.0);
    }
}

TEST(Run, OneDimensionalProfileOnlyDecays) {
    const TorusGrid g(32);
    const ScalarField c = ScalarField::sample(g, [](double x, double) { return std::cos(x); });
    for (bool nonlinear : {false, true}) {
        SolverConfig cfg;
        cfg.nonlinear_enabled = nonlinear;
        const Trajectory tr = run(c, cfg);
        EXPECT_LT(max_abs_diff(tr.snapshots.back(), std::exp(-1.0) * c), 1e-13);
    }
}

TEST(Run, TrajectoryShape) {
    SolverConfig cfg;
    cfg.t_end = 0.3;
    cfg.snapshot_every = 4;
    const Trajectory tr = run(benchmark(TorusGrid(32)), cfg);
    ASSERT_TRUE(tr.completed());
    EXPECT_EQ(tr.diagnostics.size(), tr.steps + 1);
    EXPECT_EQ(tr.times.front(), 0.0);
    EXPECT_EQ(tr.times.back(), 0.3);
    for (std::size_t i = 1; i < tr.times.size(); ++i) EXPECT_GT(tr.times[i], tr.times[i - 1]);
    EXPECT_EQ(tr.snapshots.size(), tr.times.size());
    for (const auto& r : tr.diagnostics) EXPECT_TRUE(r.valid());
}

TEST(Run, StepSizeFollowsCfl) {
    const TorusGrid g(32);
    SolverConfig cfg;
    cfg.t_end = 1.0;
    cfg.dt_max = 1.0;
    cfg.cfl = 0.5;
    const ScalarField f = benchmark(g);
    const Trajectory tr = run(f, cfg);
    const double speed = velocity_from_theta(dealias(to_spectral(f))).sup_norm();
    EXPECT_NEAR(tr.diagnostics[1].t, cfg.cfl * g.h() / speed, 1e-15);
}

TEST(Run, RejectsNonFiniteInitialData) {
    ScalarField f(TorusGrid(8));
    f.at(0, 0) = INFINITY;
    EXPECT_THROW(run(f, SolverConfig{}), InvalidArgument);
}

TEST(Run, BlowUpPolicyStopsAndReports) {
    SolverConfig cfg;
    cfg.alpha = 0.0;
    cfg.blowup_factor = 0.5;  // any surviving amplitude trips the threshold
    cfg.t_end = 1.0;
    const Trajectory tr = run(benchmark(TorusGrid(16)), cfg);
    ASSERT_TRUE(tr.blow_up);
    EXPECT_EQ(tr.steps, 1u);
    EXPECT_GT(tr.blow_up->sup_theta, 0.0);
    EXPECT_EQ(tr.diagnostics.size(), 2u);
}

class SignedRun : public ::testing::TestWithParam<AdvectionSign> {};

TEST_P(SignedRun, ConservationProperties) {
    const TorusGrid g(64);
    ScalarField f = config::modes_field(g, config::random_modes(99, 4));
    f += ScalarField::sample(g, [](double, double) { return 0.37; });
    SolverConfig cfg;
    cfg.t_end = 1.0;
    cfg.advection_sign = GetParam();
    const Trajectory tr = run(f, cfg);
    ASSERT_TRUE(tr.completed());
    const double mean0 = to_spectral(tr.snapshots.front()).mean();
    for (const auto& s : tr.snapshots) EXPECT_NEAR(to_spectral(s).mean(), mean0, 1e-12);
    const double sup0 = tr.diagnostics.front().sup_theta;
    for (std::size_t i = 1; i < tr.diagnostics.size(); ++i) {
        EXPECT_LE(tr.diagnostics[i].sup_theta, sup0 * (1 + 1e-6));
        EXPECT_LE(tr.diagnostics[i].l2, tr.diagnostics[i - 1].l2 * (1 + 1e-8));
    }
}

INSTANTIATE_TEST_SUITE_P(BothConventions, SignedRun, ::testing::Values(AdvectionSign::paper, AdvectionSign::standard));

TEST(Run, SignConventionsSwapUnderNegation) {
    // u is linear in theta, so u.grad(theta) is even under theta -> -theta while
    // the time derivative is odd: -theta solves the other convention.
    const TorusGrid g(32);
    const ScalarField f = config::modes_field(g, config::random_modes(5, 3));
    SolverConfig a;
    a.t_end = 0.5;
    SolverConfig b = a;
    b.advection_sign = AdvectionSign::standard;
    const ScalarField pa = run(f, a).snapshots.back();
    const ScalarField pb = run(-1.0 * f, b).snapshots.back();
    EXPECT_LT(max_abs_diff(pa, -1.0 * pb), 1e-14);
    EXPECT_GT(max_abs_diff(pa, run(f, b).snapshots.back()), 1e-3);  // the conventions differ
}

TEST(Run, Deterministic) {
    SolverConfig cfg;
    cfg.t_end = 0.2;
    const ScalarField f = benchmark(TorusGrid(32));
    EXPECT_EQ(run(f, cfg).snapshots.back(), run(f, cfg).snapshots.back());
}

TEST(Run, CriticalScalingSmallGrid) {
    const TorusGrid g(64);
    const ScalarField f = benchmark(g);
    const ScalarField f2 = ScalarField::sample(g, [](double x1, double x2) {
        return std::sin(2 * x1) * std::sin(2 * x2) + std::cos(2 * x2);
    });
    const Trajectory full = run(f, fixed_step(4e-3, 0.4));
    const Trajectory half = run(f2, fixed_step(2e-3, 0.2));
    const ScalarField& a = full.snapshots.back();
    const ScalarField& b = half.snapshots.back();
    double err = 0;
    for (int i = 0; i < 64; ++i)
        for (int j = 0; j < 64; ++j) err = std::max(err, std::abs(b.at(i, j) - a.at(2 * i % 64, 2 * j % 64)));
    EXPECT_LT(err, 1e-6);
}

TEST(Run, GlobalErrorIsFourthOrder) {
    const TorusGrid g(32);
    const ScalarField f = benchmark(g);
    const ScalarField ref = run(f, fixed_step(0.0025, 1.28)).snapshots.back();
    const double e1 = max_abs_diff(run(f, fixed_step(0.04, 1.28)).snapshots.back(), ref);
    const double e2 = max_abs_diff(run(f, fixed_step(0.02, 1.28)).snapshots.back(), ref);
    EXPECT_NEAR(std::log2(e1 / e2), 4.0, 0.2);
}
