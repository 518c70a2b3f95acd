#pragma once

#include <string>
#include <vector>

#include "pathlt/local_time.hpp"
#include "pathlt/quadvar.hpp"

namespace pathlt {

// sum g(x_{t_j}) (x_{t_{j+1} ∧ t} - x_{t_j ∧ t})
double follmer_sum(const Path& x, const Partition& pi, const RealFn& g, double t);

struct FollmerResult {
    double value = 0.0;
    std::vector<double> sums;  // one per partition
    std::vector<double> gaps;  // |sums[i] - sums[i-1]|
    bool converged = true;     // last gap within the policy tolerance
    json to_json() const;
};

FollmerResult follmer_integral(const Path& x, const std::vector<Partition>& seq, const RealFn& g, double t,
                               double cauchy_tol);

struct TanakaTerms {
    double f_end = 0.0;
    double f_start = 0.0;
    double riemann = 0.0;   // sum f'_-(x_{t_j}) Δx
    double pairing = 0.0;   // ∫ L df''
    double residual = 0.0;  // f_end - f_start - riemann - pairing / 2
    double scale = 0.0;     // largest term
    json to_json() const;
};

TanakaTerms tanaka_terms(const Path& x, const Partition& pi, const TestFunction& f, double t);
double tanaka_residual(const Path& x, const Partition& pi, const TestFunction& f, double t);

struct ItoTerms {
    double f_end = 0.0;
    double f_start = 0.0;
    double riemann = 0.0;   // sum f'(x_{t_j}) Δx
    double weighted = 0.0;  // sum f''(x_{t_j}) Δx^2
    double residual = 0.0;  // f_end - f_start - riemann - weighted / 2
    double bound = 0.0;     // modulus(f'', oscillation) * qv / 2
    double oscillation = 0.0;
    json to_json() const;
};

// f must have no atoms in its curvature (C^2 with continuous density).
// The bound needs the exact oscillation, which is costly on bridge paths;
// with_bound = false leaves bound and oscillation at 0.
ItoTerms ito_terms(const Path& x, const Partition& pi, const TestFunction& f, double t, bool with_bound = true);

// sup{|g(c) - g(d)| : c, d in [lo, hi], |c - d| <= delta}, from a grid with
// a Lipschitz margin (lip bounds |g'| on [lo, hi]).
double modulus_of_continuity(const RealFn& g, double lo, double hi, double delta, double lip, int samples = 4096);

// weighted_qv_sum(h) - ∫ L h du
double occupation_residual(const Path& x, const Partition& pi, const PiecewisePoly& h, double t);

struct ChangeOfVariable {
    double lhs = 0.0;    // L^{φ(x)}(φ(u))
    double rhs = 0.0;    // |φ'(u)| L^x(u)
    double bound = 0.0;  // R_t(φ', π) L^x(u)
    double remainder_modulus = 0.0;
    bool holds = false;
    json to_json() const;
};

// Shared pieces of the bound for one (path, partition, t): range and oscillation.
struct PathWindow {
    Extremes range;
    double oscillation = 0.0;
    std::vector<double> values;  // clamped values
};
PathWindow path_window(const Path& x, const Partition& pi, double t);

ChangeOfVariable change_of_variable_check(const Path& x, const Partition& pi, const ValueMap& phi, double t, double u);
ChangeOfVariable change_of_variable_check(const PathWindow& w, const ValueMap& phi, double u);

// Sup distance between L^{x∘τ,π}_t and L^{x,τ(π)}_{τ(t)}.
double time_change_check(const Path& x, const TimeMap& tau, const Partition& pi, double t);

}  // namespace pathlt
