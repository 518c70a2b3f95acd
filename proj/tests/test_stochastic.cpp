#include <gtest/gtest.h>

#include <cmath>

#include "pathlt/local_time.hpp"
#include "pathlt/quadvar.hpp"
#include "pathlt/stochastic.hpp"

using namespace pathlt;

TEST(Stochastic, OracleIsTwiceDowncrossingEstimate) {
    Path w = brownian(7);
    for (double eps : {1.0 / 64, 1.0 / 256}) {
        EXPECT_EQ(classical_local_time_oracle(w, 0.0, 1.0, eps), 2.0 * levy_downcross_estimate(w, 0.0, eps, 1.0));
        EXPECT_EQ(oracle_bias_bound(eps), 4 * eps);
    }
}

TEST(Stochastic, BrownianQvNearOne) {
    double mean = 0;
    for (int s = 1; s <= 20; ++s) mean += qv(brownian(s), dyadic_partition(14), 1.0) / 20;
    EXPECT_NEAR(mean, 1.0, 0.01);
}

TEST(Stochastic, SemimartingaleAddsDrift) {
    Path a = brownian(4), b = semimartingale(4, {2.0});
    EXPECT_NEAR(b.eval(0.5) - a.eval(0.5), 1.0, 1e-12);
}

TEST(Stochastic, PartitionFamilies) {
    Path w = brownian(2);
    EXPECT_EQ(PartitionFamily::dyadic().at(w, 5), dyadic_partition(5));
    auto p = PartitionFamily::lebesgue().at(w, 4);
    EXPECT_LE(oscillation(w, p, 1.0), 2.0 / 16 + 1e-6);
    EXPECT_EQ(PartitionFamily::parse("lebesgue").id(), PartitionFamily::lebesgue().id());
    EXPECT_THROW(PartitionFamily::parse("other"), DomainError);
}

TEST(Stochastic, CheckpointedLocalTime) {
    Path w = brownian(3);
    auto p = dyadic_partition(10);
    auto v = local_time_at_checkpoints(w, p, 0.1, {0.25, 0.5, 1.0});
    ASSERT_EQ(v.size(), 3u);
    EXPECT_NEAR(v[2], discrete_local_time(w, p, 1.0).eval(0.1), 1e-12);
    EXPECT_NEAR(v[0], discrete_local_time(w, p, 0.25).eval(0.1), 1e-12);
    EXPECT_LE(v[0], v[1] + 1e-12);
}

TEST(Stochastic, DiscrepancyIsDeterministic) {
    McOptions opt;
    opt.oracle_eps = 1.0 / 1024;
    auto gen = [](std::uint64_t s) { return brownian(s); };
    auto a = mc_discrepancy(gen, PartitionFamily::dyadic(), {6, 10}, {0.0, 0.3}, {2.0}, 1.0, {1, 2, 3, 4}, opt);
    auto b = mc_discrepancy(gen, PartitionFamily::dyadic(), {6, 10}, {0.0, 0.3}, {2.0}, 1.0, {1, 2, 3, 4}, opt);
    EXPECT_EQ(a.to_csv(), b.to_csv());
    EXPECT_EQ(a.to_json().dump(), b.to_json().dump());
    EXPECT_EQ(a.rows.size(), 4u);
    EXPECT_GT(a.row(6, 0.0, 2.0).estimate, 0.0);
    EXPECT_EQ(a.oracle_bias, oracle_bias_bound(opt.oracle_eps));
}
