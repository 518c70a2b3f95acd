#include <gtest/gtest.h>

#include <cmath>

#include "pathlt/local_time.hpp"
#include "pathlt/quadvar.hpp"
#include "pathlt/rng.hpp"

using namespace pathlt;

namespace {

// direct evaluation of 2 sum 1{min <= u < max} |x_{j+1} - u|
double brute(const std::vector<double>& v, double u) {
    long double s = 0;
    for (std::size_t j = 0; j + 1 < v.size(); ++j) {
        double lo = std::min(v[j], v[j + 1]), hi = std::max(v[j], v[j + 1]);
        if (lo <= u && u < hi) s += std::fabs(v[j + 1] - u);
    }
    return static_cast<double>(2 * s);
}

}  // namespace

TEST(LocalTime, ZigzagTwoCells) {
    // values 0, 1, 0: L = 2 on [0, 1)
    auto L = discrete_local_time(zigzag(), Partition({0.0, 0.5, 1.0}), 1.0);
    EXPECT_DOUBLE_EQ(L.eval(0.3), 2.0);
    EXPECT_DOUBLE_EQ(L.eval(0.0), 2.0);
    EXPECT_DOUBLE_EQ(L.eval(1.0), 0.0);
    EXPECT_DOUBLE_EQ(L.eval(-0.1), 0.0);
    EXPECT_DOUBLE_EQ(L.mass(), 2.0);
    EXPECT_DOUBLE_EQ(lp_norm(L, 2.0), 2.0);
    EXPECT_DOUBLE_EQ(lp_norm(L, INFINITY), 2.0);
}

TEST(LocalTime, ProfileMatchesBruteForce) {
    SplitMix r(2);
    for (int s = 0; s < 5; ++s) {
        Path x = bridge(40 + s);
        auto p = dyadic_partition(7);
        double t = r.uniform();
        auto v = clamped_values(x, p, t);
        auto L = discrete_local_time(x, p, t);
        for (int k = 0; k < 200; ++k) {
            double u = r.uniform(-2.0, 2.0);
            EXPECT_NEAR(L.eval(u), brute(v, u), 1e-12);
            EXPECT_NEAR(local_time_at(v, u), brute(v, u), 1e-12);
        }
        // values hit exactly: right-continuity at a sample
        EXPECT_NEAR(L.eval(v[3]), brute(v, v[3]), 1e-12);
    }
}

TEST(LocalTime, MassEqualsQv) {
    for (int s = 0; s < 10; ++s) {
        Path x = bridge(60 + s);
        auto p = dyadic_partition(10);
        EXPECT_NEAR(discrete_local_time(x, p, 1.0).mass(), qv(x, p, 1.0), 1e-12);
    }
}

TEST(LocalTime, CrossingDecompositionReconstructs) {
    Path x = bridge(19);
    auto p = dyadic_partition(9);
    for (double u : {-0.3, 0.0, 0.2, 0.45}) {
        auto rec = crossing_decomposition(x, p, 0.9, u);
        EXPECT_NEAR(rec.reconstruct(), local_time_at(clamped_values(x, p, 0.9), u), 1e-12);
        EXPECT_LE(std::llabs(static_cast<long long>(rec.up_times.size()) - static_cast<long long>(rec.down_times.size())), 1);
    }
}

TEST(LocalTime, CrossingCountsByHand) {
    // 0 -> 1 -> 0 -> 1 on [0, 3], band [0, 0.5]: up at 0.5 and 2.5, back down at 2
    Path x = piecewise_linear({0, 1, 2, 3}, {0, 1, 0, 1});
    auto c = crossing_counts(x, 0.0, 0.5, 3.0);
    EXPECT_EQ(c.up, 2);
    EXPECT_EQ(c.down, 1);
    ASSERT_EQ(c.tau.size(), 2u);
    EXPECT_NEAR(c.tau[0], 0.5, 1e-12);
    EXPECT_NEAR(c.tau[1], 2.5, 1e-12);
    EXPECT_DOUBLE_EQ(levy_downcross_estimate(x, 0.0, 0.5, 3.0), 0.5);
    // Lebesgue partition at spacing 1/2 moves up from 0 twice
    EXPECT_DOUBLE_EQ(lebesgue_local_time_at(x, 0.5, 3.0, 0.0), 2.0);
}

TEST(LocalTime, LevyBoundOnBridges) {
    for (int s = 0; s < 5; ++s) {
        Path x = bridge(90 + s);
        for (int e : {5, 7, 9}) {
            double eps = std::ldexp(1.0, -e);
            double L = lebesgue_local_time_at(x, eps, 1.0, 0.0);
            double D = static_cast<double>(crossing_counts(x, 0.0, eps, 1.0).down);
            EXPECT_LE(std::fabs(0.5 * L - eps * D), 2 * eps);
        }
    }
}

TEST(LocalTime, PairingAgainstAtomsAndDensities) {
    auto L = discrete_local_time(zigzag(), Partition({0.0, 0.5, 1.0}), 1.0);
    CurvatureMeasure mu;
    mu.atoms = {{0.5, 3.0}};
    EXPECT_DOUBLE_EQ(pair_against(L, mu), 6.0);
    // density 1 on [0.25, 2): integral of L there is 2 * 0.75
    EXPECT_DOUBLE_EQ(pair_density(L, PiecewisePoly::constant(0.25, 2.0, 1.0)), 1.5);
}

TEST(LocalTime, DistanceBetweenProfiles) {
    Path x = bridge(5);
    auto a = discrete_local_time(x, dyadic_partition(6), 1.0);
    EXPECT_EQ(a.distance(a), 0.0);
    auto b = discrete_local_time(x, dyadic_partition(7), 1.0);
    EXPECT_GT(a.distance(b), 0.0);
}
