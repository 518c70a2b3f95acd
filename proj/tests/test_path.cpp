#include <gtest/gtest.h>

#include <cmath>

#include "pathlt/path.hpp"
#include "pathlt/rng.hpp"

using namespace pathlt;

TEST(Path, ZigzagValuesAndExtremes) {
    Path z = zigzag();
    EXPECT_EQ(z.eval(0.0), 0.0);
    EXPECT_EQ(z.eval(0.25), 0.5);
    EXPECT_EQ(z.eval(0.5), 1.0);
    EXPECT_EQ(z.eval(0.75), 0.5);
    auto e = z.extremes(0.2, 0.9);
    EXPECT_DOUBLE_EQ(e.min, 0.2);
    EXPECT_DOUBLE_EQ(e.max, 1.0);
    auto tp = z.turning_points(0.0, 1.0);
    ASSERT_TRUE(tp.has_value());
    ASSERT_EQ(tp->size(), 1u);
    EXPECT_EQ((*tp)[0], 0.5);
}

TEST(Path, FirstHitOnAnalyticPaths) {
    Path z = zigzag();
    auto h = z.first_hit(0.75, 0.0);
    ASSERT_TRUE(h.has_value());
    EXPECT_NEAR(*h, 0.375, 1e-12);
    auto h2 = z.first_hit(0.75, 0.5);
    ASSERT_TRUE(h2.has_value());
    EXPECT_NEAR(*h2, 0.625, 1e-12);
    EXPECT_FALSE(z.first_hit(1.5, 0.0).has_value());
    auto any = z.first_hit_any(-1.0, 0.5, 0.6);
    ASSERT_TRUE(any.has_value());
    EXPECT_NEAR(any->time, 0.75, 1e-12);
}

TEST(Path, CantorPathValues) {
    Path c = cantor_path();
    // middle gap (1/3, 2/3): distance to C is t - 1/3 near the left end
    EXPECT_NEAR(c.eval(0.5), std::sqrt(2.0 / 6.0), 1e-15);
    EXPECT_NEAR(c.eval(0.4), std::sqrt(2.0 * (0.4 - 1.0 / 3.0)), 1e-15);
    EXPECT_EQ(c.eval(0.0), 0.0);
    EXPECT_EQ(c.eval(1.0), 0.0);
    EXPECT_NEAR(c.eval(1.0 / 9.0 + 1.0 / 18.0), std::sqrt(1.0 / 9.0), 1e-15);
}

TEST(Path, BridgeIsReproducibleAndConsistent) {
    Path a = bridge(5), b = bridge(5), c = bridge(6);
    EXPECT_EQ(a.eval(0.3), b.eval(0.3));
    EXPECT_NE(a.eval(0.3), c.eval(0.3));
    EXPECT_EQ(a.eval(0.0), 0.0);
    auto v = a.dyadic_values(10);
    ASSERT_EQ(v.size(), 1025u);
    for (int k = 0; k <= 1024; k += 37) EXPECT_EQ(v[k], a.eval(k / 1024.0));
}

TEST(Path, WindowValuesMatchFullGrid) {
    Path a = bridge(9);
    for (int n : {8, 14, 16}) {
        auto full = a.dyadic_values(n);
        const std::uint64_t k0 = (1u << n) / 3, k1 = std::min<std::uint64_t>(k0 + 200, 1u << n);
        auto w = a.window_values(n, k0, k1);
        ASSERT_EQ(w.size(), k1 - k0 + 1);
        for (std::size_t i = 0; i < w.size(); ++i) EXPECT_EQ(w[i], full[k0 + i]) << n << " " << i;
    }
}

TEST(Path, BridgeExtremesBracketSamples) {
    Path a = bridge(2);
    auto e = a.extremes(0.1, 0.6);
    auto v = a.dyadic_values(14);
    for (std::size_t k = 0; k < v.size(); ++k) {
        double t = k / 16384.0;
        if (t < 0.1 || t > 0.6) continue;
        EXPECT_LE(v[k], e.max + 1e-12);
        EXPECT_GE(v[k], e.min - 1e-12);
    }
}

TEST(Path, BridgeFirstHitLandsOnLevel) {
    Path a = bridge(4);
    auto e = a.extremes(0.0, 1.0);
    double level = 0.5 * (e.max + a.eval(0.0));
    auto h = a.first_hit(level, 0.0);
    ASSERT_TRUE(h.has_value());
    EXPECT_NEAR(a.eval(*h), level, 1e-5);
    EXPECT_LT(a.extremes(0.0, *h - 1e-9).max, level + 1e-6);
}

TEST(Path, TimeChangedAndMapped) {
    Path x = bridge(3);
    TimeMap tau = TimeMap::power(2.0);
    Path y = time_changed(x, tau);
    for (double t : {0.1, 0.37, 0.8}) EXPECT_EQ(y.eval(t), x.eval(t * t));
    EXPECT_NEAR(tau.inverse(tau(0.42)), 0.42, 1e-15);
    ValueMap phi = ValueMap::exp(0.7);
    Path m = mapped(x, phi);
    for (double t : {0.1, 0.37, 0.8}) EXPECT_DOUBLE_EQ(m.eval(t), std::exp(0.7 * x.eval(t)));
    auto poly = TimeMap::poly({0.25, 0.75});
    EXPECT_DOUBLE_EQ(poly(0.5), 0.25 * 0.5 + 0.75 * 0.25);
    // weights are normalized to unit sum so that tau(1) = 1
    EXPECT_DOUBLE_EQ(TimeMap::poly({0.5, 0.5, 1.0})(1.0), 1.0);
    EXPECT_THROW(TimeMap::poly({0.5, -0.2}), DomainError);
}

TEST(Path, JsonRoundTrip) {
    for (Path p : {zigzag(), cantor_path(), linear(2.0, 1.0), bridge(12), drifted(3, {0.5, -1.0}),
                   time_changed(bridge(1), TimeMap::power(1.5)), mapped(zigzag(), ValueMap::logistic(2.0, 0.1))}) {
        Path q = Path::from_json(p.to_json());
        for (double t : {0.0, 0.123, 0.5, 0.999}) EXPECT_EQ(p.eval(t), q.eval(t)) << p.to_json().dump();
    }
}

TEST(Path, ParseSpecs) {
    EXPECT_EQ(parse_path("constant:3").eval(0.4), 3.0);
    EXPECT_DOUBLE_EQ(parse_path("linear:2,1").eval(0.5), 2.0);
    EXPECT_DOUBLE_EQ(parse_path("pl:0,0;0.5,2;1,0").eval(0.25), 1.0);
    EXPECT_EQ(parse_path("bridge:8").eval(0.3), bridge(8).eval(0.3));
    EXPECT_THROW(parse_path("nonsense"), DomainError);
}

TEST(Path, DriftAddsPolynomial) {
    Path x = bridge(21), y = drifted(21, {1.0, 2.0});
    for (double t : {0.2, 0.5, 0.9}) EXPECT_NEAR(y.eval(t) - x.eval(t), t + t * t, 1e-12);
}
