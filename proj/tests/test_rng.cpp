#include <gtest/gtest.h>

#include <cmath>

#include "pathlt/rng.hpp"

using namespace pathlt;

TEST(Rng, NormalQuantileKnownValues) {
    // reference quantiles of the standard normal
    EXPECT_NEAR(normal_quantile(0.5), 0.0, 1e-15);
    EXPECT_NEAR(normal_quantile(0.975), 1.959963984540054, 1e-14);
    EXPECT_NEAR(normal_quantile(0.8413447460685429), 1.0, 1e-13);
    EXPECT_NEAR(normal_quantile(1e-10), -6.361340902404056, 1e-11);
    EXPECT_DOUBLE_EQ(normal_quantile(0.2), -normal_quantile(0.8));
}

TEST(Rng, QuantileInvertsErfc) {
    for (double p = 0.001; p < 1.0; p += 0.0137) {
        double z = normal_quantile(p);
        EXPECT_NEAR(0.5 * std::erfc(-z / std::sqrt(2.0)), p, 1e-14);
    }
}

TEST(Rng, SplitMixReproducible) {
    SplitMix a(42), b(42), c(43);
    for (int i = 0; i < 100; ++i) {
        auto x = a.next();
        EXPECT_EQ(x, b.next());
        EXPECT_NE(x, c.next());
    }
}

TEST(Rng, RangeAndUniformBounds) {
    SplitMix r(7);
    for (int i = 0; i < 10000; ++i) {
        auto k = r.range(-3, 5);
        EXPECT_GE(k, -3);
        EXPECT_LE(k, 5);
        double u = r.uniform();
        EXPECT_GT(u, 0.0);
        EXPECT_LT(u, 1.0);
    }
}

TEST(Rng, NodeNormalsAreStandard) {
    const int N = 200000;
    double s = 0, s2 = 0;
    for (int k = 0; k < N; ++k) {
        double z = node_normal(11, static_cast<std::uint64_t>(k), 17);
        s += z;
        s2 += z * z;
    }
    EXPECT_NEAR(s / N, 0.0, 5.0 / std::sqrt(N));
    EXPECT_NEAR(s2 / N, 1.0, 5.0 * std::sqrt(2.0 / N));
    EXPECT_EQ(node_normal(11, 5, 3), node_normal(11, 5, 3));
    EXPECT_NE(node_normal(11, 5, 3), node_normal(12, 5, 3));
    EXPECT_NE(node_normal(11, 5, 3), node_normal(11, 5, 4));
}
