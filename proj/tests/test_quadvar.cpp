#include <gtest/gtest.h>

#include <cmath>

#include "pathlt/quadvar.hpp"
#include "pathlt/rng.hpp"

using namespace pathlt;

namespace {

// straightforward long double evaluation as an independent reference
long double naive_qv(const Path& x, const Partition& p, double t) {
    long double s = 0;
    double prev = x.eval(0.0);
    for (std::size_t j = 1; j < p.size(); ++j) {
        double tj = std::min(p.times[j], t);
        double v = x.eval(tj);
        s += static_cast<long double>(v - prev) * (v - prev);
        prev = v;
        if (p.times[j] >= t) break;
    }
    return s;
}

}  // namespace

TEST(Quadvar, ZigzagDyadicFour) {
    // 16 cells of width 1/16, slope 2: each increment is 1/8, so QV = 16/64
    EXPECT_DOUBLE_EQ(qv(zigzag(), dyadic_partition(4), 1.0), 0.25);
}

TEST(Quadvar, LinearPathScalesWithMesh) {
    for (int n : {1, 3, 7, 12}) EXPECT_NEAR(qv(linear(1.5), dyadic_partition(n), 1.0), 2.25 * std::ldexp(1.0, -n), 1e-15);
}

TEST(Quadvar, ConstantPathIsZero) { EXPECT_EQ(qv(constant(3.0), dyadic_partition(6), 1.0), 0.0); }

TEST(Quadvar, ClampsAtTime) {
    Path x = zigzag();
    Partition p({0.0, 0.5, 1.0});
    // up to t = 0.75: increments 1 and -0.5
    EXPECT_DOUBLE_EQ(qv(x, p, 0.75), 1.25);
    auto v = clamped_values(x, p, 0.75);
    ASSERT_EQ(v.size(), 3u);
    EXPECT_EQ(v.back(), 0.5);
}

TEST(Quadvar, MatchesNaiveSumOnBridges) {
    SplitMix r(1);
    for (int s = 0; s < 10; ++s) {
        Path x = bridge(100 + s);
        auto p = dyadic_partition(11);
        double t = r.uniform();
        EXPECT_NEAR(qv(x, p, t), static_cast<double>(naive_qv(x, p, t)), 1e-12);
    }
}

TEST(Quadvar, IncrementAdditivity) {
    Path x = bridge(77);
    auto p = dyadic_partition(9);
    double a = qv_increment(x, p, 0.25, 0.5), b = qv_increment(x, p, 0.5, 0.875);
    EXPECT_NEAR(a + b, qv_increment(x, p, 0.25, 0.875), 1e-14);
    EXPECT_NEAR(qv_increment(x, p, 0.0, 0.6), qv(x, p, 0.6), 1e-14);
}

TEST(Quadvar, WeightedSums) {
    Path x = bridge(8);
    auto p = dyadic_partition(10);
    EXPECT_NEAR(weighted_qv_sum(x, p, [](double) { return 1.0; }, 1.0), qv(x, p, 1.0), 1e-13);
    // weight f(x) = x^2 against a direct loop
    auto v = clamped_values(x, p, 1.0);
    long double ref = 0;
    for (std::size_t j = 0; j + 1 < v.size(); ++j) ref += static_cast<long double>(v[j]) * v[j] * (v[j + 1] - v[j]) * (v[j + 1] - v[j]);
    EXPECT_NEAR(weighted_qv_sum(x, p, [](double u) { return u * u; }, 1.0), static_cast<double>(ref), 1e-12);
}

TEST(Quadvar, CurveAndCauchyGaps) {
    Path x = bridge(3);
    std::vector<double> cps{0.25, 0.5, 1.0};
    auto c8 = qv_curve(x, dyadic_partition(8), cps), c10 = qv_curve(x, dyadic_partition(10), cps);
    ASSERT_EQ(c8.values.size(), 3u);
    EXPECT_NEAR(c8.values[1], qv(x, dyadic_partition(8), 0.5), 1e-14);
    auto g = cauchy_gaps({c8, c10});
    ASSERT_EQ(g.size(), 1u);
    double m = 0;
    for (int i = 0; i < 3; ++i) m = std::max(m, std::fabs(c8.values[i] - c10.values[i]));
    EXPECT_NEAR(g[0], m, 1e-15);
}
