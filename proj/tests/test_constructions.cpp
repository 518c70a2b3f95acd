#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "pathlt/constructions.hpp"
#include "pathlt/quadvar.hpp"
#include "pathlt/rng.hpp"

using namespace pathlt;

TEST(Cantor, GapsOfLevelTwo) {
    auto g = cantor_gaps(2);
    ASSERT_EQ(g.size(), 2u);
    EXPECT_NEAR(g[0].left, 1.0 / 9, 1e-16);
    EXPECT_NEAR(g[1].left, 7.0 / 9, 1e-16);
    EXPECT_NEAR(g[0].length, 1.0 / 9, 1e-16);
    EXPECT_NEAR(g[0].peak, 1.0 / 3, 1e-16);
}

TEST(Cantor, IntervalQvClosedForm) {
    // each gap interval of level i at stage n carries 2 3^-i / 2^(n i)
    auto s = CantorSchedule::standard();
    for (int n = 1; n <= 5; ++n)
        for (int i = 1; i <= std::min(n, 3); ++i)
            EXPECT_NEAR(cantor_interval_qv(i, 0, n, s), 2.0 / std::pow(3.0, i) / std::pow(2.0, n * i),
                        1e-15 * std::pow(3.0, -i));
}

TEST(Cantor, ReferenceValues) {
    auto s = CantorSchedule::standard();
    EXPECT_NEAR(cantor_interval_qv(1, 0, 1, s), 1.0 / 3, 1e-16);
    EXPECT_NEAR(cantor_interval_qv(2, 1, 1, s), 1.0 / 18, 1e-16);
    EXPECT_EQ(cantor_function_value(0.0), 0.0);
    EXPECT_EQ(cantor_function_value(1.0), 1.0);
    EXPECT_DOUBLE_EQ(cantor_function_value(0.5), 0.5);
    for (double t : {1.0 / 9, 1.5 / 9, 2.0 / 9}) EXPECT_DOUBLE_EQ(cantor_function_value(t), 0.25);
    EXPECT_DOUBLE_EQ(cantor_function_value(7.5 / 9), 0.75);
}

TEST(Cantor, MaterializedPartitionAgreesWithStreaming) {
    auto s = CantorSchedule::standard();
    Path c = cantor_path();
    for (int n = 1; n <= 3; ++n) {
        auto p = cantor_partitions(n, s);
        EXPECT_NEAR(qv(c, p, 1.0), cantor_stage_qv(n, s), 1e-9) << n;
    }
}

TEST(Cantor, StageTotalIsGeometricSum) {
    auto s = CantorSchedule::standard();
    for (int n = 1; n <= 4; ++n) {
        double r = 2.0 / (3.0 * std::pow(2.0, n));
        double closed = r * (1 - std::pow(r, n)) / (1 - r);
        EXPECT_NEAR(cantor_stage_qv(n, s), closed, 1e-14);
        EXPECT_NEAR(cantor_geometric_sum(n), closed, 1e-15);
    }
}

TEST(Cantor, LocalTimeAwayFromZeroShrinks) {
    auto s = CantorSchedule::standard();
    double prev = INFINITY;
    for (int n = 1; n <= 5; ++n) {
        double L = cantor_local_time_at(n, s, 0.1);
        EXPECT_LT(L, prev);
        prev = L;
    }
    EXPECT_NEAR(cantor_local_time_at(1, s, 0.1), 1.0 / std::sqrt(3.0), 1e-12);
}

TEST(Cantor, ScheduleJsonAndConstant) {
    auto s = CantorSchedule::constant(4);
    EXPECT_EQ(s.m(2, 3), 4);
    EXPECT_EQ(CantorSchedule::from_json(s.to_json()).m(1, 2), 4);
    EXPECT_EQ(CantorSchedule::standard().m(2, 3), 64);
    EXPECT_THROW(CantorSchedule::standard().m(0, 2), DomainError);
    EXPECT_THROW(CantorSchedule::custom({{2}}).m(2, 1), DomainError);
}

TEST(Metric, PropertiesOnExtendedHalfLine) {
    const double inf = std::numeric_limits<double>::infinity();
    EXPECT_EQ(qv_metric(inf, inf), 0.0);
    EXPECT_NEAR(qv_metric(0.0, inf), 1.0, 0.0);
    SplitMix r(5);
    for (int k = 0; k < 1000; ++k) {
        double a = r.uniform(0, 5), b = r.uniform(0, 5), c = r.uniform(0, 5);
        EXPECT_EQ(qv_metric(a, b), qv_metric(b, a));
        EXPECT_LE(qv_metric(a, c), qv_metric(a, b) + qv_metric(b, c) + 1e-16);
        // sums: d(a+c, b+c) <= d(a, b)
        EXPECT_LE(qv_metric(a + c, b + c), qv_metric(a, b) + 1e-16);
    }
}

TEST(Blowup, ZigzagSaturatesAtTwo) {
    auto r = blowup_partition(zigzag(), 0.0, 1.0, 3.0, 20);
    EXPECT_NEAR(r.achieved, 2.0, 1e-15);
    EXPECT_EQ(r.status, "saturated");
    auto r2 = blowup_partition(zigzag(), 0.0, 1.0, 1.5, 20);
    EXPECT_GE(r2.achieved, 1.5);
}

TEST(Blowup, ExtremaMergeKeepsTheBestPair) {
    // 0, 1, 0.9, 2: merging the inner pair is better since 4 >= 1 + 0.01 + 1.21
    std::vector<double> v{0.0, 1.0, 0.9, 2.0};
    auto idx = extrema_merge(v);
    EXPECT_EQ(idx, (std::vector<std::size_t>{0, 3}));
    std::vector<double> w{0.0, 1.0, -1.0, 0.5};
    auto jdx = extrema_merge(w);
    EXPECT_EQ(jdx, (std::vector<std::size_t>{0, 1, 2, 3}));
}

TEST(Blowup, BridgeExceedsTarget) {
    auto r = blowup_partition(bridge(3), 0.0, 1.0, 2.0, 20);
    EXPECT_GE(r.achieved, 2.0);
    EXPECT_NEAR(qv(bridge(3), r.partition, 1.0), r.achieved, 1e-12);
    for (std::size_t i = 1; i < r.history.size(); ++i) EXPECT_GE(r.history[i].second, r.history[i - 1].second);
    EXPECT_GT(vitali_psi(0.01), 0.0);
    EXPECT_TRUE(std::isinf(vitali_psi(0.5)));
}

TEST(Targeting, HalfTimeOnBridge) {
    Path x = bridge(3);
    auto res = target_qv_partitions(x, TargetSchedule::linear(0.5), 3, dyadic_partition(1));
    EXPECT_TRUE(res.achieved);
    EXPECT_LE(res.sup_error, 0.125);
    EXPECT_TRUE(res.partition.refines(dyadic_partition(3)));
    for (std::size_t i = 0; i < res.anchors.size(); ++i)
        EXPECT_NEAR(res.anchor_qv[i], qv(x, res.partition, res.anchors[i]), 1e-12);
}

TEST(Targeting, ScheduleJson) {
    TargetSchedule s;
    s.times = {0.0, 0.5, 1.0};
    s.values = {0.0, 1.0, std::numeric_limits<double>::infinity()};
    s.jumps = {{0.5, 0.25}};
    auto t = TargetSchedule::from_json(s.to_json());
    EXPECT_TRUE(std::isinf(t(1.0)));
    EXPECT_DOUBLE_EQ(t(0.5), 1.25);
    EXPECT_DOUBLE_EQ(t(0.25), 0.5);
    EXPECT_EQ(t.jump_times(0.1), (std::vector<double>{0.5}));
}
