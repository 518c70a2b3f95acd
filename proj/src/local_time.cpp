#include "pathlt/local_time.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "pathlt/kernels.hpp"
#include "pathlt/quadvar.hpp"

namespace pathlt {

namespace {

struct Event {
    double u;
    double dA;  // change of the constant part
    int dB;     // change of the slope, in units of 2
    int dN;     // change of the number of active cells
};

}  // namespace

LocalTimeProfile LocalTimeProfile::from_values(const std::vector<double>& v) {
    std::vector<Event> ev;
    ev.reserve(2 * v.size());
    for (std::size_t j = 0; j + 1 < v.size(); ++j) {
        const double a = v[j], b = v[j + 1];
        if (a < b) {  // 2(b - u) on [a, b)
            ev.push_back({a, 2.0 * b, -1, 1});
            ev.push_back({b, -2.0 * b, +1, -1});
        } else if (a > b) {  // 2(u - b) on [b, a)
            ev.push_back({b, -2.0 * b, +1, 1});
            ev.push_back({a, 2.0 * b, -1, -1});
        }
    }
    std::sort(ev.begin(), ev.end(), [](const Event& x, const Event& y) { return x.u < y.u; });

    LocalTimeProfile p;
    kernels::Kahan A;
    long long B = 0;
    long long active = 0;
    for (std::size_t i = 0; i < ev.size();) {
        const double u = ev[i].u;
        double left = p.knots.empty() ? 0.0 : A.sum + 2.0 * static_cast<double>(B) * u;
        for (; i < ev.size() && ev[i].u == u; ++i) {
            A.add(ev[i].dA);
            B += ev[i].dB;
            active += ev[i].dN;
        }
        if (active == 0) A = kernels::Kahan{};
        double right = A.sum + 2.0 * static_cast<double>(B) * u;
        p.knots.push_back(u);
        p.left.push_back(std::max(left, 0.0));
        p.right.push_back(std::max(right, 0.0));
        p.slope.push_back(2.0 * static_cast<double>(B));
    }

    // Merge knots without a jump or slope change.
    LocalTimeProfile q;
    for (std::size_t i = 0; i < p.knots.size(); ++i) {
        bool interior = i > 0 && i + 1 < p.knots.size();
        if (interior && p.slope[i] == p.slope[i - 1] &&
            std::fabs(p.right[i] - p.left[i]) <= 1e-14 * (1.0 + std::fabs(p.right[i])))
            continue;
        q.knots.push_back(p.knots[i]);
        q.left.push_back(p.left[i]);
        q.right.push_back(p.right[i]);
        q.slope.push_back(p.slope[i]);
    }
    return q;
}

double LocalTimeProfile::eval(double u) const {
    auto it = std::upper_bound(knots.begin(), knots.end(), u);
    if (it == knots.begin()) return 0.0;
    std::size_t i = static_cast<std::size_t>(it - knots.begin()) - 1;
    if (u == knots[i]) return right[i];
    return std::max(0.0, right[i] + slope[i] * (u - knots[i]));
}

double LocalTimeProfile::left_limit(double u) const {
    auto it = std::lower_bound(knots.begin(), knots.end(), u);
    if (it != knots.end() && *it == u) return left[static_cast<std::size_t>(it - knots.begin())];
    return eval(u);
}

double LocalTimeProfile::mass() const {
    kernels::Kahan s;
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        const double h = knots[i + 1] - knots[i];
        s.add(0.5 * (right[i] + left[i + 1]) * h);
    }
    return s.sum;
}

double LocalTimeProfile::max_value() const {
    double m = 0.0;
    for (std::size_t i = 0; i < knots.size(); ++i) m = std::max({m, left[i], right[i]});
    return m;
}

double LocalTimeProfile::distance(const LocalTimeProfile& o) const {
    double d = 0.0;
    auto probe = [&](double u) {
        d = std::max(d, std::fabs(eval(u) - o.eval(u)));
        d = std::max(d, std::fabs(left_limit(u) - o.left_limit(u)));
    };
    for (double u : knots) probe(u);
    for (double u : o.knots) probe(u);
    return d;
}

std::string LocalTimeProfile::to_csv() const {
    std::ostringstream os;
    os.precision(17);
    os << "u,left,right,slope\n";
    for (std::size_t i = 0; i < knots.size(); ++i) os << knots[i] << "," << left[i] << "," << right[i] << "," << slope[i] << "\n";
    return os.str();
}

json LocalTimeProfile::to_json() const {
    return {{"knots", knots}, {"left", left}, {"right", right}, {"slope", slope}};
}

LocalTimeProfile discrete_local_time(const Path& x, const Partition& pi, double t) {
    return LocalTimeProfile::from_values(clamped_values(x, pi, t));
}

double local_time_at(const std::vector<double>& v, double u) {
    kernels::Kahan s;
    for (std::size_t j = 0; j + 1 < v.size(); ++j) {
        const double a = v[j], b = v[j + 1];
        if (std::min(a, b) <= u && u < std::max(a, b)) s.add(std::fabs(b - u));
    }
    return 2.0 * s.sum;
}

CrossingRecord crossing_decomposition(const Path& x, const Partition& pi, double t, double u) {
    CrossingRecord r;
    auto v = clamped_values(x, pi, t);
    // cells completed by time t are those with t_{j+1} <= t
    std::size_t complete = 0;
    for (std::size_t j = 0; j + 1 < pi.size() && pi.times[j + 1] <= t; ++j) ++complete;
    kernels::Kahan up, down;
    for (std::size_t j = 0; j + 1 < v.size(); ++j) {
        const double a = v[j], b = v[j + 1];
        if (!(std::min(a, b) <= u && u < std::max(a, b))) continue;
        if (j >= complete) {
            r.boundary = std::fabs(b - u);
        } else if (a < b) {
            r.up_times.push_back(pi.times[j]);
            up.add(b - u);
        } else {
            r.down_times.push_back(pi.times[j]);
            down.add(u - b);
        }
    }
    r.up_sum = up.sum;
    r.down_sum = down.sum;
    return r;
}

CrossingCounts crossing_counts(const Path& x, double u, double eps, double t, double tol) {
    if (!(eps > 0)) throw DomainError("eps must be positive");
    CrossingCounts c;
    double from = 0.0;
    while (true) {
        auto tau = x.first_hit(u + eps, from, tol);
        if (!tau || *tau > t) break;
        c.tau.push_back(*tau);
        ++c.up;
        auto sigma = x.first_hit(u, *tau, tol);
        if (!sigma || *sigma > t) break;
        c.sigma.push_back(*sigma);
        ++c.down;
        from = *sigma;
    }
    return c;
}

double levy_downcross_estimate(const Path& x, double u, double eps, double t, double tol) {
    return eps * static_cast<double>(crossing_counts(x, u, eps, t, tol).down);
}

double lebesgue_local_time_at(const Path& x, double eps, double t, double u) {
    if (!(eps > 0)) throw DomainError("eps must be positive");
    long long moves_up = 0;
    double now = 0.0;
    double last_level_value = std::numeric_limits<double>::quiet_NaN();
    bool at_u = x.eval(0.0) == u;
    while (true) {
        if (!at_u) {
            auto h = x.first_hit(u, now);
            if (!h || *h > t) break;
            now = *h;
            at_u = true;
            continue;
        }
        auto h = x.first_hit_any(u - eps, u + eps, now);
        if (!h || h->time > t) {
            last_level_value = u;
            break;
        }
        now = h->time;
        if (h->which == 1) ++moves_up;
        at_u = false;
    }
    double boundary = 0.0;
    if (last_level_value == u) boundary = std::max(0.0, x.eval(t) - u);
    return 2.0 * (eps * static_cast<double>(moves_up) + boundary);
}

double lp_norm(const LocalTimeProfile& L, double p) {
    if (!(p >= 1.0)) throw DomainError("p must be in [1, inf]");
    if (std::isinf(p)) return L.max_value();
    const bool integer = p == std::floor(p) && p <= 64;
    kernels::Kahan s;
    for (std::size_t i = 0; i + 1 < L.knots.size(); ++i) {
        const double h = L.knots[i + 1] - L.knots[i];
        const double a = L.right[i], b = L.left[i + 1];
        double seg;
        if (integer) {
            const int n = static_cast<int>(p);
            double acc = 0.0;
            for (int k = 0; k <= n; ++k) acc += std::pow(a, n - k) * std::pow(b, k);
            seg = acc / (p + 1.0);
        } else if (std::fabs(b - a) <= 1e-12 * std::max(a, b)) {
            seg = std::pow(0.5 * (a + b), p);
        } else {
            seg = (std::pow(b, p + 1.0) - std::pow(a, p + 1.0)) / ((p + 1.0) * (b - a));
        }
        s.add(seg * h);
    }
    return std::pow(s.sum, 1.0 / p);
}

double pair_density(const LocalTimeProfile& L, const PiecewisePoly& h) {
    kernels::Kahan s;
    for (std::size_t i = 0; i + 1 < L.knots.size(); ++i) {
        if (L.right[i] == 0.0 && L.slope[i] == 0.0) continue;
        s.add(h.integrate_linear(L.knots[i], L.knots[i + 1], L.right[i], L.slope[i], L.knots[i]));
    }
    return s.sum;
}

double pair_against(const LocalTimeProfile& L, const CurvatureMeasure& mu) {
    kernels::Kahan s;
    for (const auto& a : mu.atoms) s.add(a.weight * L.eval(a.at));
    s.add(pair_density(L, mu.density));
    return s.sum;
}

}  // namespace pathlt
