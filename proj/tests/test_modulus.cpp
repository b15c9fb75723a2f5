#include <gtest/gtest.h>

#include <cmath>
#include <memory>
#include <numbers>
#include <random>

#include "sqg/sqg.hpp"

using namespace sqg;
using std::numbers::e;
using std::numbers::pi;

// ---------------------------------------------------------------------------
// Quadrature
// ---------------------------------------------------------------------------

TEST(Quadrature, PolynomialsAreExact) {
    const auto r = quad::integrate([](double x) { return 3 * x * x - x + 2; }, -1.0, 2.0);
    EXPECT_NEAR(r.value, 9.0 - 1.5 + 6.0, 1e-13);
    EXPECT_TRUE(r.converged);
}

TEST(Quadrature, LogPieceHandlesEndpointSingularity) {
    // int_0^1 x^{-1/2} = 2 after the sqrt substitution.
    const quad::Piece p = quad::sqrt_start_piece([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0);
    const auto r = quad::integrate(std::span<const quad::Piece>(&p, 1));
    EXPECT_NEAR(r.value, 2.0, 1e-12);
    // int_1^1e12 1/x over twelve decades.
    const quad::Piece q = quad::log_piece([](double x) { return 1.0 / x; }, 1.0, 1e12);
    EXPECT_NEAR(quad::integrate(std::span<const quad::Piece>(&q, 1)).value, 12 * std::log(10.0), 1e-11);
}

TEST(Quadrature, ErrorEstimateCoversTheTruth) {
    for (double k : {3.0, 10.0, 40.0}) {
        const auto r = quad::integrate([k](double x) { return std::cos(k * x); }, 0.0, 1.0, {1e-14, 1e-8});
        EXPECT_LE(std::abs(r.value - std::sin(k) / k), std::max(r.error, 1e-15)) << "k=" << k;
    }
}

// ---------------------------------------------------------------------------
// Explicit modulus
// ---------------------------------------------------------------------------

TEST(KnvOmega, Values) {
    const KnvModulusParams p{1e-2, 1e-3};
    EXPECT_EQ(knv_omega(0.0, p), 0.0);
    EXPECT_NEAR(knv_omega(1e-2, p), 0.009, 1e-17);
    EXPECT_NEAR(knv_omega(1e-2 * std::exp(4.0), p), 0.009 + 1e-3 * std::log(2.0), 1e-15);
    EXPECT_NEAR(knv_omega(1e-2 * std::exp(4.0), p), 0.009693147180559945, 1e-15);
    EXPECT_THROW(knv_omega(-1e-9, p), InvalidArgument);
}

TEST(KnvOmega, Derivatives) {
    const KnvModulusParams p{1e-2, 1e-3};
    EXPECT_EQ(knv_omega_prime(0.0, Side::right, p), 1.0);
    EXPECT_NEAR(knv_omega_prime(1e-12, Side::right, p), 1.0, 2e-6);
    EXPECT_NEAR(knv_omega_prime(1e-2, Side::right, p), 0.025, 1e-15);
    EXPECT_NEAR(knv_omega_prime(1e-2, Side::left, p), 0.85, 1e-15);
    EXPECT_NEAR(knv_omega_second(1e-4, p), -75.0, 1e-12);
    EXPECT_THROW(knv_omega_second(2e-2, p), InvalidArgument);
    EXPECT_THROW(knv_omega_second(0.0, p), InvalidArgument);
}

TEST(KnvOmega, AdmissibilityReport) {
    EXPECT_TRUE(admissibility_violations({1e-4, 1e-5}).empty());
    const auto v = admissibility_violations({1e-4, 1.0});
    ASSERT_EQ(v.size(), 1u);
    EXPECT_EQ(v[0], "gamma < delta/2 violated");
    EXPECT_EQ(admissibility_violations({0.02, 1e-3}).at(0), "delta <= 0.01 violated");
}

class KnvShape : public ::testing::TestWithParam<KnvModulusParams> {};

TEST_P(KnvShape, IncreasingConcaveContinuous) {
    const KnvModulusParams p = GetParam();
    const auto grid = log_grid(1e-10 * p.delta, 1e10 * p.delta, 2001);
    double prev_quot = INFINITY;
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double a = grid[i - 1], b = grid[i];
        const double quot = KnvModulus(p).increment(a, b - a) / (b - a);
        EXPECT_GT(quot, 0.0);
        EXPECT_LE(quot, prev_quot * (1 + 1e-12)) << "at xi=" << b;
        prev_quot = quot;
    }
    const double d = p.delta;
    EXPECT_NEAR(knv_omega(d * (1 + 1e-14), p), knv_omega(d, p), 1e-15);
    EXPECT_TRUE(knv_is_concave(p));
}

TEST_P(KnvShape, ClosedFormMatchesQuadratureOfDerivative) {
    const KnvModulusParams p = GetParam();
    const double base = knv_omega(p.delta, p);
    for (double xi : log_grid(p.delta * 1.001, p.delta * 1e12, 64)) {
        // s = log(eta / delta):  int w'(eta) d eta = int gamma / (4 + s) ds.
        const auto r = quad::integrate([&](double s) { return p.gamma / (4.0 + s); }, 0.0, std::log(xi / p.delta),
                                       {1e-300, 1e-14});
        const double by_quadrature = base + r.value;
        EXPECT_NEAR(knv_omega(xi, p), by_quadrature, 1e-11 * by_quadrature) << "xi=" << xi;
    }
}

TEST_P(KnvShape, IncrementMatchesDifferenceAwayFromCancellation) {
    const KnvModulus w(GetParam());
    for (double x : {1e-7, 1e-4, 3e-3, 1.0, 1e3})
        for (double h : {1e-3, 0.5, 10.0}) {
            const double direct = w.omega(x + h * x) - w.omega(x);
            EXPECT_NEAR(w.increment(x, h * x), direct, 1e-9 * std::abs(direct) + 1e-18);
        }
}

INSTANTIATE_TEST_SUITE_P(Params, KnvShape,
                         ::testing::Values(KnvModulusParams{1e-4, 1e-5}, KnvModulusParams{1e-2, 1e-3},
                                           KnvModulusParams{3.2e-3, 3.2e-4}, KnvModulusParams{1e-7, 1e-9}));

TEST(KnvOmega, TailSlackEnclosesRemainder) {
    const KnvModulus w({1e-4, 1e-5});
    for (double H : {1e-2, 1.0, 1e4}) {
        // Reference remainder from a long quadrature plus a far enclosure.
        FunctionalOptions opt;
        opt.tol = {1e-300, 1e-13};
        const double body = detail::weighted_integral(w, 2, H, 1e12 * H, opt).value;
        const double far = w.omega(1e12 * H) / (1e12 * H);
        const double remainder = body + far;
        EXPECT_GE(remainder, w.omega(H) / H * (1 - 1e-12));
        EXPECT_LE(remainder, (1 + w.tail_slack(H)) * w.omega(H) / H);
    }
}

// ---------------------------------------------------------------------------
// Omega
// ---------------------------------------------------------------------------

TEST(BigOmega, ClampedModulusGoldenValues) {
    const auto w = PiecewiseLinearModulus::clamped(1.0);
    const auto one = big_omega(1.0, w, 1.0);
    EXPECT_NEAR(one.value.value, 2.0, 1e-10);
    EXPECT_LE(one.value.error, 1e-9);
    EXPECT_NEAR(big_omega(1.0 / e, w, 1.0).value.value, 3.0 / e, 1e-10);
    EXPECT_NEAR(big_omega(1.0 / e, w, 2.5).value.value, 2.5 * 3.0 / e, 1e-10);
}

TEST(BigOmega, VanishesAtOrigin) {
    const KnvModulus w({1e-4, 1e-5});
    EXPECT_EQ(big_omega(0.0, w, 1.0).value.value, 0.0);
    EXPECT_LT(big_omega(1e-14, w, 1.0).value.value, 1e-12);
}

TEST(BigOmega, DivergentTailIsRejected) {
    EXPECT_THROW(big_omega(1.0, LinearModulus(2.0), 1.0), DivergentTail);
    EXPECT_THROW(big_omega(0.0, LinearModulus(2.0), 1.0), DivergentTail);
}

TEST(BigOmega, PowerModulusClosedForm) {
    // w = eta^p: Omega = xi^p (1/p + 1/(1-p)).
    const PowerModulus w(1.0, 0.5);
    for (double xi : {1e-3, 0.3, 7.0}) EXPECT_NEAR(big_omega(xi, w, 1.0).value.value, 4.0 * std::sqrt(xi), 1e-9 * std::sqrt(xi));
}

TEST(BigOmega, DerivativeIsTailIntegral) {
    const KnvModulus w({1e-4, 1e-5});
    for (double xi : log_grid(1e-9, 1e5, 32)) {
        const double h = 1e-4 * xi;
        const double left = big_omega(xi - h, w, 1.0).value.value, right = big_omega(xi + h, w, 1.0).value.value;
        const double numeric = (right - left) / (2 * h);
        const Estimate tail = tail_integral(w, xi);
        // Central difference error is O(h^2 Omega''') plus quadrature noise divided by h.
        const double tol = 1e-6 * tail.value + 2 * (big_omega(xi, w, 1.0).value.error / h) + tail.error;
        EXPECT_NEAR(numeric, tail.value, tol) << "xi=" << xi;
    }
}

TEST(BigOmega, IncreasingAndConcaveOnGrid) {
    const KnvModulus w({1e-4, 1e-5});
    const auto grid = log_grid(1e-10, 1e6, 200);
    std::vector<double> v;
    for (double xi : grid) v.push_back(big_omega(xi, w, 1.0).value.value);
    for (std::size_t i = 1; i < v.size(); ++i) EXPECT_GT(v[i], v[i - 1]);
    for (std::size_t i = 2; i < v.size(); ++i) {
        const double q1 = (v[i - 1] - v[i - 2]) / (grid[i - 1] - grid[i - 2]);
        const double q2 = (v[i] - v[i - 1]) / (grid[i] - grid[i - 1]);
        EXPECT_LE(q2, q1 * (1 + 1e-8));
    }
}

// ---------------------------------------------------------------------------
// Dissipation
// ---------------------------------------------------------------------------

TEST(Dissipation, ClampedModulusGoldenValue) {
    const auto d = dissipation_functional(2.0, PiecewiseLinearModulus::clamped(1.0));
    EXPECT_NEAR(d.total.value, -(2.0 / pi) * std::log(3.0), 1e-9);
    EXPECT_NEAR(d.first.value, 1 - 2 * std::log(2.0), 1e-9);
    EXPECT_NEAR(d.second.value, -1 - 2 * std::log(1.5), 1e-9);
}

TEST(Dissipation, LinearModulusGivesZero) {
    for (double xi : {1e-3, 1.0, 50.0}) EXPECT_NEAR(dissipation_functional(xi, LinearModulus(3.0)).total.value, 0.0, 1e-12);
    // Linear up to L, flat after: only the second integral sees the kink, for
    // eta >= a = (L - xi)/2, and integrates to -2 log(1 + xi/a) / pi.
    const double L = 1e9, xi = 0.1, a = (L - xi) / 2;
    const double kink = -2 * std::log1p(xi / a) / pi;
    EXPECT_NEAR(dissipation_functional(xi, PiecewiseLinearModulus({L}, {1.0, 0.0})).total.value, kink, 1e-15);
}

TEST(Dissipation, NonConcaveIsRejected) {
    const PiecewiseLinearModulus convex({1.0}, {1.0, 2.0});
    EXPECT_THROW(dissipation_functional(1.0, convex), NonConcaveModulus);
    EXPECT_THROW(dissipation_functional(1.0, KnvModulus({1e-4, 1.0})), NonConcaveModulus);
}

TEST(Dissipation, StrictlyNegativeForExplicitModulus) {
    const KnvModulus w({1e-4, 1e-5});
    for (double xi : log_grid(1e-12, 1e4, 60)) {
        const auto d = dissipation_functional(xi, w).total;
        EXPECT_LT(d.value + d.error, 0.0) << "xi=" << xi;
    }
}

namespace {

PiecewiseLinearModulus random_concave(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> count(1, 5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const int k = count(rng);
    std::vector<double> knots, slopes;
    double x = 0.0, s = 0.5 + 2 * u(rng);
    slopes.push_back(s);
    for (int i = 0; i < k; ++i) {
        x += 0.05 + 2 * u(rng);
        knots.push_back(x);
        s *= u(rng);
        slopes.push_back(s);
    }
    slopes.back() = 0.0;  // bounded, so the tails converge
    return {knots, slopes};
}

}  // namespace

TEST(Dissipation, NonPositiveOnRandomConcaveCorpus) {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(-3.0, 1.5);
    for (int trial = 0; trial < 40; ++trial) {
        const auto w = random_concave(rng);
        const double xi = std::pow(10.0, u(rng));
        const auto d = dissipation_functional(xi, w).total;
        EXPECT_LE(d.value, d.error) << "trial " << trial << " xi=" << xi;
    }
}

TEST(Dissipation, ErrorEstimateIsHonestUnderRefinement) {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(-2.0, 1.0);
    for (int trial = 0; trial < 30; ++trial) {
        const auto w = random_concave(rng);
        const double xi = std::pow(10.0, u(rng));
        FunctionalOptions coarse;
        coarse.tol = {1e-300, 1e-6};
        FunctionalOptions fine = coarse;
        fine.tol.rel /= 2;
        const auto a = dissipation_functional(xi, w, coarse).total;
        const auto b = dissipation_functional(xi, w, fine).total;
        EXPECT_LE(std::abs(a.value - b.value), a.error + 1e-15) << "trial " << trial;
    }
}

TEST(Flow, ExamplesAtAndBelowBreakpoint) {
    const KnvModulusParams p{1e-4, 1e-5};
    EXPECT_EQ(flow_functional(0.0, KnvModulus(p), 1.0).value, 0.0);
    const double at_delta = flow_functional(1e-4, p, 1.0).value;
    EXPECT_GT(at_delta, 0.0);
    EXPECT_LT(at_delta, 3e-4);
    for (double xi : log_grid(1e-12, 1e-4, 40))
        EXPECT_LE(flow_functional(xi, p, 1.0).value, xi * (3 + std::log(1e-4 / xi)) * (1 + 1e-10));
    // Left derivative at the kink is the larger one.
    const KnvModulus w(p);
    EXPECT_GT(flow_functional(1e-4, w, 1.0, Side::left).value, flow_functional(1e-4, w, 1.0, Side::right).value);
}

TEST(ScaledModulus, FamilyRelations) {
    auto base = std::make_shared<KnvModulus>(KnvModulusParams{1e-4, 1e-5});
    const ScaledModulus w3(base, 3.0);
    for (double xi : {1e-6, 1e-3, 1.0}) {
        EXPECT_DOUBLE_EQ(w3.omega(xi), base->omega(3 * xi));
        EXPECT_DOUBLE_EQ(w3.omega_prime_right(xi), 3 * base->omega_prime_right(3 * xi));
        // Omega of w_C at xi equals Omega of w at C xi.
        EXPECT_NEAR(big_omega(xi, w3, 1.0).value.value, big_omega(3 * xi, *base, 1.0).value.value,
                    1e-9 * big_omega(3 * xi, *base, 1.0).value.value);
    }
}
