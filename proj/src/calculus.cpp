#include "pathlt/calculus.hpp"

#include <algorithm>
#include <cmath>

#include "pathlt/kernels.hpp"

namespace pathlt {

double follmer_sum(const Path& x, const Partition& pi, const RealFn& g, double t) {
    auto v = clamped_values(x, pi, t);
    if (v.size() < 2) return 0.0;
    std::vector<double> w(v.size() - 1);
    for (std::size_t j = 0; j + 1 < v.size(); ++j) w[j] = g(v[j]);
    return kernels::weighted_increment_sum(v.data(), w.data(), v.size());
}

json FollmerResult::to_json() const {
    return {{"value", value}, {"sums", sums}, {"gaps", gaps}, {"converged", converged}};
}

FollmerResult follmer_integral(const Path& x, const std::vector<Partition>& seq, const RealFn& g, double t,
                               double cauchy_tol) {
    if (seq.empty()) throw DomainError("partition sequence is empty");
    FollmerResult r;
    for (const auto& pi : seq) {
        r.sums.push_back(follmer_sum(x, pi, g, t));
        if (r.sums.size() > 1) r.gaps.push_back(std::fabs(r.sums.back() - r.sums[r.sums.size() - 2]));
    }
    r.value = r.sums.back();
    r.converged = r.gaps.empty() || r.gaps.back() <= cauchy_tol;
    return r;
}

json TanakaTerms::to_json() const {
    return {{"f_end", f_end}, {"f_start", f_start}, {"riemann", riemann}, {"pairing", pairing},
            {"residual", residual}, {"scale", scale}};
}

TanakaTerms tanaka_terms(const Path& x, const Partition& pi, const TestFunction& f, double t) {
    TanakaTerms r;
    auto v = clamped_values(x, pi, t);
    if (v.empty()) return r;
    r.f_start = f(v.front());
    r.f_end = f(v.back());
    if (v.size() >= 2) {
        std::vector<double> w(v.size() - 1);
        for (std::size_t j = 0; j + 1 < v.size(); ++j) w[j] = f.left_derivative(v[j]);
        r.riemann = kernels::weighted_increment_sum(v.data(), w.data(), v.size());
    }
    r.pairing = pair_against(LocalTimeProfile::from_values(v), f.curvature);
    r.residual = r.f_end - r.f_start - r.riemann - 0.5 * r.pairing;
    r.scale = std::max({std::fabs(r.f_end), std::fabs(r.f_start), std::fabs(r.riemann), 0.5 * std::fabs(r.pairing)});
    return r;
}

double tanaka_residual(const Path& x, const Partition& pi, const TestFunction& f, double t) {
    return tanaka_terms(x, pi, f, t).residual;
}

json ItoTerms::to_json() const {
    return {{"f_end", f_end},       {"f_start", f_start}, {"riemann", riemann},       {"weighted", weighted},
            {"residual", residual}, {"bound", bound},     {"oscillation", oscillation}};
}

double modulus_of_continuity(const RealFn& g, double lo, double hi, double delta, double lip, int samples) {
    if (!(hi > lo) || !(delta > 0)) return 0.0;
    delta = std::min(delta, hi - lo);
    const double step = (hi - lo) / samples;
    std::vector<double> gv(static_cast<std::size_t>(samples) + 1);
    for (int i = 0; i <= samples; ++i) gv[static_cast<std::size_t>(i)] = g(i == samples ? hi : lo + step * i);
    const auto window = static_cast<std::size_t>(std::floor(delta / step));
    double best = 0.0;
    for (std::size_t i = 0; i < gv.size(); ++i) {
        for (std::size_t j = i + 1; j <= std::min(gv.size() - 1, i + window); ++j)
            best = std::max(best, std::fabs(gv[j] - gv[i]));
        if (window == 0) break;
    }
    // pairs off the grid move each end by at most one step
    return best + 2.0 * lip * step;
}

ItoTerms ito_terms(const Path& x, const Partition& pi, const TestFunction& f, double t, bool with_bound) {
    if (!f.smooth()) throw DomainError("Ito residual needs a C^2 function (no curvature atoms)");
    ItoTerms r;
    auto v = clamped_values(x, pi, t);
    if (v.size() < 2) return r;
    r.f_start = f(v.front());
    r.f_end = f(v.back());
    std::vector<double> d1(v.size() - 1), d2(v.size() - 1);
    for (std::size_t j = 0; j + 1 < v.size(); ++j) {
        d1[j] = f.left_derivative(v[j]);
        d2[j] = f.second_derivative(v[j]);
    }
    r.riemann = kernels::weighted_increment_sum(v.data(), d1.data(), v.size());
    r.weighted = kernels::weighted_sq_increment_sum(v.data(), d2.data(), v.size());
    r.residual = r.f_end - r.f_start - r.riemann - 0.5 * r.weighted;
    if (!with_bound) return r;

    auto range = x.extremes(pi.start(), std::min(t, pi.end()));
    r.oscillation = oscillation(x, pi, t);
    // |f'''| on the range bounds the Lipschitz constant of f''
    double lip = 0.0;
    const int probes = 256;
    for (int i = 0; i <= probes; ++i) {
        double u = range.min + (range.max - range.min) * i / probes;
        double h = 1e-6 * (1.0 + std::fabs(u));
        lip = std::max(lip, std::fabs(f.second_derivative(u + h) - f.second_derivative(u - h)) / (2 * h));
    }
    lip *= 1.5;
    double omega = modulus_of_continuity([&](double u) { return f.second_derivative(u); }, range.min, range.max,
                                         r.oscillation, lip);
    r.bound = 0.5 * omega * kernels::sq_increment_sum(v.data(), v.size());
    return r;
}

double occupation_residual(const Path& x, const Partition& pi, const PiecewisePoly& h, double t) {
    auto v = clamped_values(x, pi, t);
    if (v.size() < 2) return 0.0;
    std::vector<double> w(v.size() - 1);
    for (std::size_t j = 0; j + 1 < v.size(); ++j) w[j] = h(v[j]);
    double lhs = kernels::weighted_sq_increment_sum(v.data(), w.data(), v.size());
    return lhs - pair_density(LocalTimeProfile::from_values(v), h);
}

json ChangeOfVariable::to_json() const {
    return {{"lhs", lhs}, {"rhs", rhs}, {"bound", bound}, {"remainder_modulus", remainder_modulus}, {"holds", holds}};
}

PathWindow path_window(const Path& x, const Partition& pi, double t) {
    PathWindow w;
    w.values = clamped_values(x, pi, t);
    w.range = x.extremes(pi.start(), std::min(t, pi.end()));
    w.oscillation = oscillation(x, pi, t);
    return w;
}

ChangeOfVariable change_of_variable_check(const PathWindow& w, const ValueMap& phi, double u) {
    const double lo = w.range.min, hi = w.range.max;
    // monotone on the range: derivative keeps one sign
    const double d_lo = phi.d1(lo), d_hi = phi.d1(hi);
    if (!(d_lo * d_hi > 0)) throw DomainError("value map is not strictly monotone on the path range");

    ChangeOfVariable r;
    std::vector<double> mapped(w.values.size());
    for (std::size_t j = 0; j < w.values.size(); ++j) mapped[j] = phi(w.values[j]);
    const double L = local_time_at(w.values, u);
    r.lhs = local_time_at(mapped, phi(u));
    r.rhs = std::fabs(phi.d1(u)) * L;
    if (phi.kind == ValueMap::Kind::affine) {
        r.remainder_modulus = 0.0;
    } else {
        double lip = 0.0;
        const int probes = 256;
        for (int i = 0; i <= probes; ++i) lip = std::max(lip, std::fabs(phi.d2(lo + (hi - lo) * i / probes)));
        // d2 of exp/logistic is smooth; widen for values between probes
        lip = lip * 1.25 + 1e-12;
        r.remainder_modulus =
            modulus_of_continuity([&](double y) { return phi.d1(y); }, lo, hi, w.oscillation, lip);
    }
    r.bound = r.remainder_modulus * L;
    const double tol = 1e-10 * std::max({std::fabs(r.lhs), std::fabs(r.rhs), 1e-300});
    r.holds = std::fabs(r.lhs - r.rhs) <= r.bound + tol;
    return r;
}

ChangeOfVariable change_of_variable_check(const Path& x, const Partition& pi, const ValueMap& phi, double t, double u) {
    return change_of_variable_check(path_window(x, pi, t), phi, u);
}

double time_change_check(const Path& x, const TimeMap& tau, const Partition& pi, double t) {
    auto composed = time_changed(x, tau);
    auto lhs = discrete_local_time(composed, pi, t);
    std::vector<double> mapped;
    for (double s : pi.times) {
        double v = tau(s);
        if (mapped.empty() || v > mapped.back()) mapped.push_back(v);
    }
    auto rhs = discrete_local_time(x, Partition(mapped), tau(t));
    return lhs.distance(rhs);
}

}  // namespace pathlt
