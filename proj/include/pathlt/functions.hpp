#pragma once

#include <string>
#include <utility>
#include <vector>

#include "pathlt/path.hpp"

namespace pathlt {

// sum_k c[k] (u - origin)^k on [lo, hi). Bounds may be infinite.
struct PolyPiece {
    double lo = 0.0;
    double hi = 0.0;
    double origin = 0.0;
    std::vector<double> c;

    double operator()(double u) const;
    // Integrals of p(y) and (y - origin) p(y) over [a, b] ⊆ [lo, hi].
    std::pair<double, double> moments(double a, double b) const;
    PolyPiece shifted(double new_origin) const;
};

class PiecewisePoly {
public:
    std::vector<PolyPiece> pieces;  // sorted, disjoint

    static PiecewisePoly constant(double lo, double hi, double value);
    static PiecewisePoly polynomial(std::vector<double> coeffs);  // on the whole line, origin 0
    static PiecewisePoly sum(const std::vector<PiecewisePoly>& parts);

    double operator()(double u) const;
    double integral(double a, double b) const;
    // Integral of (alpha + beta (y - anchor)) p(y) over [a, b].
    double integrate_linear(double a, double b, double alpha, double beta, double anchor) const;
    bool empty() const { return pieces.empty(); }
    int degree() const;
    PiecewisePoly scaled(double s) const;

    json to_json() const;
    static PiecewisePoly from_json(const json& j);
};

struct Atom {
    double at = 0.0;
    double weight = 0.0;
};

// Signed measure: point masses plus a piecewise-polynomial density.
struct CurvatureMeasure {
    std::vector<Atom> atoms;  // sorted by location, distinct locations
    PiecewisePoly density;

    double mass(double a, double b) const;  // measure of [a, b)
    void normalize();                        // sort and merge atoms
    bool zero() const { return atoms.empty() && density.empty(); }
    CurvatureMeasure operator+(const CurvatureMeasure& o) const;
    CurvatureMeasure scaled(double s) const;

    json to_json() const;
    static CurvatureMeasure from_json(const json& j);
};

// f(u) = f(x0) + f'_-(x0)(u - x0) + ∫_[x0,u) (u - y) f''(dy) for u >= x0, and
// the mirrored formula below x0.
struct TestFunction {
    double anchor = 0.0;
    double value_at_anchor = 0.0;
    double slope_at_anchor = 0.0;  // left derivative
    CurvatureMeasure curvature;

    double operator()(double u) const;
    double left_derivative(double u) const;
    double second_derivative(double u) const;  // density part only
    bool smooth() const { return curvature.atoms.empty(); }
    TestFunction operator+(const TestFunction& o) const;
    TestFunction scaled(double s) const;
    // Breakpoints of the representation (atoms and density piece ends).
    std::vector<double> breakpoints() const;

    json to_json() const;
    static TestFunction from_json(const json& j);
};

// Sums of terms c*{1, u, u^k, abs(u-a), pos(u-a), neg(u-a), tent(a,b,c)}.
TestFunction parse_function(const std::string& text);
// Same grammar plus ind(u>=a), ind(u<a), box(a,b); the result as a
// piecewise polynomial (for weights and occupation densities).
PiecewisePoly parse_weight(const std::string& text);

struct Mollifier {
    std::vector<double> g;    // polynomial on [0,1]
    std::vector<double> cdf;  // its antiderivative vanishing at 0

    static Mollifier standard();  // 140 z^3 (1-z)^3
    static Mollifier from_coeffs(std::vector<double> g);
    double operator()(double z) const;
    double mass() const;
};

// f_n = g_n * f with g_n(u) = n g(n u).
TestFunction mollify(const TestFunction& f, int n, const Mollifier& g = Mollifier::standard());

// Gauss-Legendre (8 nodes) on [a,b]; exact for polynomials of degree <= 15.
// Accumulates in extended precision so exact results round correctly.
template <class F>
double gauss8(F&& f, double a, double b) {
    static constexpr long double x[4] = {0.1834346424956498049394761L, 0.5255324099163289858177390L,
                                         0.7966664774136267395915539L, 0.9602898564975362316835609L};
    static constexpr long double w[4] = {0.3626837833783619829651504L, 0.3137066458778872873379622L,
                                         0.2223810344533744705443560L, 0.1012285362903762591525314L};
    const long double m = 0.5L * (static_cast<long double>(a) + b), h = 0.5L * (static_cast<long double>(b) - a);
    long double s = 0.0L;
    for (int i = 0; i < 4; ++i)
        s += w[i] * (static_cast<long double>(f(static_cast<double>(m - h * x[i]))) +
                     static_cast<long double>(f(static_cast<double>(m + h * x[i]))));
    return static_cast<double>(s * h);
}

}  // namespace pathlt
