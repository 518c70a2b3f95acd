#include <gtest/gtest.h>

#include <cmath>

#include "pathlt/partition.hpp"
#include "pathlt/quadvar.hpp"

using namespace pathlt;

TEST(Partition, DyadicGrid) {
    // multiples of 2^-n inside [0, T]
    auto p = dyadic_partition(3, 2.0);
    ASSERT_EQ(p.size(), 17u);
    EXPECT_EQ(p.times[3], 0.375);
    EXPECT_EQ(p.end(), 2.0);
    EXPECT_TRUE(dyadic_partition(5).refines(dyadic_partition(3)));
    EXPECT_FALSE(dyadic_partition(3).refines(dyadic_partition(5)));
}

TEST(Partition, RejectsUnsortedTimes) {
    EXPECT_THROW(Partition({0.0, 0.5, 0.4, 1.0}), DomainError);
}

TEST(Partition, MergeAndRestrict) {
    Partition a({0.0, 0.3, 1.0}), b({0.0, 0.5, 1.0});
    auto m = merge(a, b);
    EXPECT_EQ(m.times, (std::vector<double>{0.0, 0.3, 0.5, 1.0}));
    auto r = restrict(m, 0.4, 1.0);
    EXPECT_EQ(r.times, (std::vector<double>{0.4, 0.5, 1.0}));
}

TEST(Partition, CsvAndJsonRoundTrip) {
    Partition p({0.0, 0.1, 1.0 / 3.0, 1.0});
    EXPECT_EQ(Partition::from_csv(p.to_csv()), p);
    EXPECT_EQ(Partition::from_json(p.to_json()), p);
    auto seq = read_partition_sequence(write_partition_sequence({p, dyadic_partition(2)}));
    ASSERT_EQ(seq.size(), 2u);
    EXPECT_EQ(seq[1], dyadic_partition(2));
}

TEST(Partition, LebesgueOnZigzag) {
    // zigzag crosses the quarter levels at multiples of 1/8
    auto p = lebesgue_partition(zigzag(), ValueGrid::uniform(0.25), 1.0);
    ASSERT_EQ(p.size(), 9u);
    for (int k = 0; k <= 8; ++k) EXPECT_NEAR(p.times[k], k / 8.0, 1e-12);
}

TEST(Partition, LebesgueOnBridgeHasGridIncrements) {
    Path x = bridge(14);
    const double h = 1.0 / 16;
    auto p = lebesgue_partition(x, ValueGrid::uniform(h), 1.0);
    auto v = clamped_values(x, p, 1.0);
    for (std::size_t j = 1; j + 1 < v.size(); ++j) EXPECT_NEAR(std::fabs(v[j] - v[j - 1]), h, 1e-6);
    EXPECT_LE(oscillation(x, p, 1.0), 2 * h + 1e-6);
}

TEST(Partition, FreedmanScaleOnLinearPath) {
    // linear path: each cell splits into k equal value steps, QV divides by k exactly
    Path x = linear(3.0);
    Partition p({0.0, 0.2, 0.7, 1.0});
    for (long long k : {2LL, 5LL, 8LL}) {
        auto f = freedman_scale(x, p, k);
        EXPECT_EQ(f.size(), 3 * k + 1);
        EXPECT_NEAR(qv(x, f, 1.0), qv(x, p, 1.0) / static_cast<double>(k), 1e-12);
        EXPECT_TRUE(f.refines(p));
    }
}

TEST(Partition, OscillationOfZigzag) {
    EXPECT_NEAR(oscillation(zigzag(), Partition({0.0, 0.25, 1.0}), 1.0), 1.0, 1e-15);
    EXPECT_NEAR(oscillation(zigzag(), dyadic_partition(2), 1.0), 0.5, 1e-15);
}
