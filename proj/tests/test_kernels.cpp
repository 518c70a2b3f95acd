#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "pathlt/kernels.hpp"
#include "pathlt/rng.hpp"

using namespace pathlt;
namespace k = pathlt::kernels;

namespace {

std::vector<double> walk(std::size_t n, std::uint64_t seed) {
    SplitMix r(seed);
    std::vector<double> v(n);
    double x = 0;
    for (auto& e : v) e = (x += 0.01 * r.normal());
    return v;
}

const std::vector<std::size_t> kSizes{0, 1, 2, 3, 5, 17, 1023, 1024, 1025, 2049, 4096, 4097, 8193, 50001};

}  // namespace

TEST(Kernels, ScalarMatchesLongDoubleReference) {
    for (auto n : kSizes) {
        auto v = walk(n, n + 1), w = walk(n, n + 2);
        long double sq = 0, wsq = 0, winc = 0;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            long double d = static_cast<long double>(v[i + 1]) - v[i];
            sq += d * d;
            wsq += w[i] * d * d;
            winc += w[i] * d;
        }
        const double tol = 1e-13;
        EXPECT_NEAR(k::scalar::sq_increment_sum(v.data(), n), static_cast<double>(sq), tol * (1 + std::fabs((double)sq)));
        EXPECT_NEAR(k::scalar::weighted_sq_increment_sum(v.data(), w.data(), n), static_cast<double>(wsq),
                    tol * (1 + std::fabs((double)wsq)));
        EXPECT_NEAR(k::scalar::weighted_increment_sum(v.data(), w.data(), n), static_cast<double>(winc),
                    tol * (1 + std::fabs((double)winc)));
    }
}

// Vector variants must reproduce the scalar reference bit for bit.
TEST(Kernels, VectorVariantsBitwiseEqualScalar) {
    for (auto n : kSizes) {
        auto v = walk(n, 3 * n + 1), w = walk(n, 3 * n + 2);
        const double s0 = k::scalar::sq_increment_sum(v.data(), n);
        const double s1 = k::scalar::weighted_sq_increment_sum(v.data(), w.data(), n);
        const double s2 = k::scalar::weighted_increment_sum(v.data(), w.data(), n);
        if (k::isa_available(k::Isa::avx2)) {
            EXPECT_EQ(k::avx2::sq_increment_sum(v.data(), n), s0) << n;
            EXPECT_EQ(k::avx2::weighted_sq_increment_sum(v.data(), w.data(), n), s1) << n;
            EXPECT_EQ(k::avx2::weighted_increment_sum(v.data(), w.data(), n), s2) << n;
        }
        if (k::isa_available(k::Isa::neon)) {
            EXPECT_EQ(k::neon::sq_increment_sum(v.data(), n), s0) << n;
            EXPECT_EQ(k::neon::weighted_sq_increment_sum(v.data(), w.data(), n), s1) << n;
            EXPECT_EQ(k::neon::weighted_increment_sum(v.data(), w.data(), n), s2) << n;
        }
    }
}

TEST(Kernels, DispatchFollowsForcedIsa) {
    auto v = walk(9000, 5);
    const double ref = k::scalar::sq_increment_sum(v.data(), v.size());
    const auto before = k::active_isa();
    for (auto isa : {k::Isa::scalar, k::Isa::avx2, k::Isa::neon}) {
        if (!k::isa_available(isa)) {
            EXPECT_THROW(k::force_isa(isa), std::runtime_error);
            continue;
        }
        k::force_isa(isa);
        EXPECT_EQ(k::active_isa(), isa);
        EXPECT_EQ(k::sq_increment_sum(v.data(), v.size()), ref) << k::isa_name(isa);
    }
    k::force_isa(before);
    EXPECT_TRUE(k::isa_available(k::Isa::scalar));
}
