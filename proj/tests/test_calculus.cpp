#include <gtest/gtest.h>

#include <cmath>

#include "pathlt/calculus.hpp"
#include "pathlt/local_time.hpp"
#include "pathlt/rng.hpp"

using namespace pathlt;

TEST(Calculus, TanakaOnZigzagExample) {
    auto t = tanaka_terms(zigzag(), Partition({0.0, 0.5, 1.0}), parse_function("abs(u-0.5)"), 1.0);
    EXPECT_EQ(t.residual, 0.0);
    EXPECT_DOUBLE_EQ(t.f_end, 0.5);
    EXPECT_DOUBLE_EQ(t.f_start, 0.5);
}

TEST(Calculus, TanakaResidualVanishesOnBridges) {
    SplitMix r(4);
    for (int s = 0; s < 5; ++s) {
        Path x = bridge(200 + s);
        auto p = dyadic_partition(10);
        TestFunction f = parse_function("abs(u-0.1)") + parse_function("pos(u+0.3)").scaled(2.0) + parse_function("u^3");
        auto t = tanaka_terms(x, p, f, r.uniform(0.2, 1.0));
        EXPECT_LE(std::fabs(t.residual), 1e-12 * t.scale);
        EXPECT_DOUBLE_EQ(tanaka_residual(x, p, f, 1.0), tanaka_terms(x, p, f, 1.0).residual);
    }
}

TEST(Calculus, ItoIsExactForSquares) {
    // x_t^2 - x_0^2 = sum 2 x_j dx + sum dx^2 holds identically
    Path x = bridge(31);
    auto it = ito_terms(x, dyadic_partition(9), parse_function("u^2"), 1.0);
    EXPECT_NEAR(it.residual, 0.0, 1e-13);
    EXPECT_GE(it.bound, 0.0);
}

TEST(Calculus, ItoResidualWithinBound) {
    for (int s = 0; s < 5; ++s) {
        Path x = bridge(300 + s);
        auto it = ito_terms(x, dyadic_partition(8), parse_function("u^4"), 1.0);
        EXPECT_LE(std::fabs(it.residual), it.bound);
    }
    EXPECT_THROW(ito_terms(bridge(1), dyadic_partition(4), parse_function("abs(u)"), 1.0), DomainError);
}

TEST(Calculus, FollmerSumOfConstantIsIncrement) {
    Path x = bridge(12);
    auto p = dyadic_partition(8);
    EXPECT_NEAR(follmer_sum(x, p, [](double) { return 1.0; }, 0.7), x.eval(0.7) - x.eval(0.0), 1e-13);
    // g(u) = 2u: sum 2 x_j dx = x_t^2 - x_0^2 - qv
    double q = 0.0;
    auto v = clamped_values(x, p, 1.0);
    for (std::size_t j = 0; j + 1 < v.size(); ++j) q += (v[j + 1] - v[j]) * (v[j + 1] - v[j]);
    EXPECT_NEAR(follmer_sum(x, p, [](double u) { return 2 * u; }, 1.0), v.back() * v.back() - q, 1e-12);
}

TEST(Calculus, FollmerIntegralConverges) {
    Path x = bridge(13);
    std::vector<Partition> seq{dyadic_partition(8), dyadic_partition(10), dyadic_partition(12), dyadic_partition(14)};
    auto r = follmer_integral(x, seq, [](double u) { return u; }, 1.0, 0.05);
    ASSERT_EQ(r.sums.size(), 4u);
    ASSERT_EQ(r.gaps.size(), 3u);
    EXPECT_TRUE(r.converged);
    EXPECT_EQ(r.value, r.sums.back());
}

TEST(Calculus, OccupationResidualSmall) {
    Path x = bridge(17);
    EXPECT_LE(std::fabs(occupation_residual(x, dyadic_partition(10), PiecewisePoly::constant(-5, 5, 1.0), 1.0)), 1e-12);
}

TEST(Calculus, ModulusOfSine) {
    // sin on [0, pi] is steepest at the ends: the worst pair is (0, delta)
    for (double d : {0.01, 0.1, 0.5}) {
        double w = modulus_of_continuity([](double u) { return std::sin(u); }, 0.0, M_PI, d, 1.0);
        EXPECT_GE(w, std::sin(d) - 1e-12);
        EXPECT_LE(w, std::sin(d) + 2.0 * M_PI / 4096 + 1e-12);
    }
}

TEST(Calculus, AffineChangeOfVariableIsExact) {
    Path x = bridge(23);
    auto p = dyadic_partition(9);
    for (double a : {-2.0, 0.5, 3.0}) {
        auto c = change_of_variable_check(x, p, ValueMap::affine(a, 0.3), 1.0, 0.05);
        EXPECT_NEAR(c.lhs, c.rhs, 1e-10 * std::max(1.0, c.rhs));
        EXPECT_TRUE(c.holds);
        EXPECT_EQ(c.bound, 0.0);
    }
}

TEST(Calculus, NonlinearChangeOfVariableWithinBound) {
    Path x = bridge(24);
    auto w = path_window(x, dyadic_partition(10), 1.0);
    for (double u : {-0.2, 0.0, 0.15}) {
        for (auto phi : {ValueMap::exp(1.3), ValueMap::logistic(2.0, 0.1)}) {
            auto c = change_of_variable_check(w, phi, u);
            EXPECT_LE(std::fabs(c.lhs - c.rhs), c.bound * (1 + 1e-10) + 1e-14);
        }
    }
}

TEST(Calculus, TimeChangeLeavesProfileUnchanged) {
    Path x = bridge(25);
    EXPECT_EQ(time_change_check(x, TimeMap::power(2.0), dyadic_partition(8), 1.0), 0.0);
    EXPECT_EQ(time_change_check(x, TimeMap::poly({0.2, 0.3, 0.5}), Partition({0.0, 0.3, 0.31, 0.9, 1.0}), 0.95), 0.0);
}
