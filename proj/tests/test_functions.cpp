#include <gtest/gtest.h>

#include <cmath>

#include "pathlt/functions.hpp"
#include "pathlt/rng.hpp"

using namespace pathlt;

TEST(Functions, AbsShifted) {
    auto f = parse_function("abs(u-0.5)");
    EXPECT_DOUBLE_EQ(f(0.0), 0.5);
    EXPECT_DOUBLE_EQ(f(2.0), 1.5);
    EXPECT_DOUBLE_EQ(f.left_derivative(0.5), -1.0);
    EXPECT_DOUBLE_EQ(f.left_derivative(0.6), 1.0);
    ASSERT_EQ(f.curvature.atoms.size(), 1u);
    EXPECT_DOUBLE_EQ(f.curvature.atoms[0].at, 0.5);
    EXPECT_DOUBLE_EQ(f.curvature.atoms[0].weight, 2.0);
    EXPECT_FALSE(f.smooth());
}

TEST(Functions, PowerMatchesClosedForm) {
    auto f = parse_function("u^4");
    EXPECT_TRUE(f.smooth());
    for (double u : {-1.3, -0.2, 0.0, 0.7, 2.1}) {
        EXPECT_NEAR(f(u), std::pow(u, 4), 1e-12 * (1 + std::pow(u, 4)));
        EXPECT_NEAR(f.left_derivative(u), 4 * std::pow(u, 3), 1e-12 * (1 + std::fabs(4 * std::pow(u, 3))));
        EXPECT_NEAR(f.second_derivative(u), 12 * u * u, 1e-12 * (1 + 12 * u * u));
    }
}

TEST(Functions, SumsAndScaling) {
    auto f = parse_function("abs(u)") + parse_function("u^2").scaled(3.0);
    for (double u : {-1.0, 0.25, 1.5}) EXPECT_NEAR(f(u), std::fabs(u) + 3 * u * u, 1e-13);
    EXPECT_THROW(parse_function("sin(u)"), DomainError);
}

TEST(Functions, CurvatureReconstructsFunction) {
    // f(u) = f(a) + f'(a)(u-a) + integral of (u - y)^+ or (y - u)^+ against f''
    SplitMix r(3);
    TestFunction f;
    f.anchor = 0.1;
    f.value_at_anchor = 0.7;
    f.slope_at_anchor = -0.4;
    f.curvature.atoms = {{-0.5, 1.5}, {0.8, 0.25}};
    f.curvature.density = PiecewisePoly::constant(-1.0, 1.0, 2.0);
    for (int k = 0; k < 50; ++k) {
        double u = r.uniform(-2.0, 2.0);
        long double ref = 0.7L - 0.4L * (u - 0.1);
        for (const auto& a : f.curvature.atoms) {
            if (u > f.anchor && a.at >= f.anchor && a.at < u) ref += a.weight * (u - a.at);
            if (u < f.anchor && a.at < f.anchor && a.at >= u) ref += a.weight * (a.at - u);
        }
        // density part: 2 on [-1,1) integrated twice from the anchor
        auto clip = [](double v) { return std::clamp(v, -1.0, 1.0); };
        double lo = clip(std::min(u, 0.1)), hi = clip(std::max(u, 0.1));
        if (u > 0.1) ref += 2.0 * ((u - lo) * (u - lo) - (u - hi) * (u - hi)) / 2.0;
        else ref += 2.0 * ((hi - u) * (hi - u) - (lo - u) * (lo - u)) / 2.0;
        EXPECT_NEAR(f(u), static_cast<double>(ref), 1e-12) << u;
    }
}

TEST(Functions, PiecewisePolyIntegrals) {
    auto p = PiecewisePoly::sum({PiecewisePoly::polynomial({1.0, 0.0, 3.0}), PiecewisePoly::constant(0.0, 0.5, 2.0)});
    auto g = [&](double u) { return p(u); };
    EXPECT_NEAR(p.integral(-1.0, 2.0), gauss8(g, -1.0, 0.0) + gauss8(g, 0.0, 0.5) + gauss8(g, 0.5, 2.0), 1e-12);
    EXPECT_NEAR(p.integral(-1.0, 2.0), 3.0 + (8.0 + 1.0) + 1.0, 1e-12);
    EXPECT_EQ(p.degree(), 2);
}

TEST(Functions, MollifierHasUnitMass) {
    auto g = Mollifier::standard();
    EXPECT_NEAR(g.mass(), 1.0, 1e-15);
    EXPECT_NEAR(gauss8([&](double z) { return g(z); }, 0.0, 1.0), 1.0, 1e-14);
    EXPECT_DOUBLE_EQ(g(0.5), 140.0 / 64.0);
    EXPECT_THROW(Mollifier::from_coeffs({2.0}), DomainError);
}

TEST(Functions, MollifiedAbs) {
    auto f = parse_function("abs(u)");
    for (int n : {1, 4, 16, 64, 256}) {
        auto fn = mollify(f, n);
        EXPECT_EQ(fn(0.0), 1.0 / (2.0 * n)) << n;
        EXPECT_TRUE(fn.smooth());
        // away from the kink, |u - Z/n| averages to u - 1/(2n)
        EXPECT_NEAR(fn(2.0), 2.0 - 1.0 / (2.0 * n), 1e-13);
        EXPECT_NEAR(fn(-2.0), 2.0 + 1.0 / (2.0 * n), 1e-13);
    }
}

TEST(Functions, JsonRoundTrip) {
    auto f = parse_function("abs(u-0.25)") + parse_function("u^3");
    auto g = TestFunction::from_json(f.to_json());
    for (double u : {-1.0, 0.1, 0.25, 0.9}) EXPECT_EQ(f(u), g(u));
}
