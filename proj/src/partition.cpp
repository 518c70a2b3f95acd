#include "pathlt/partition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace pathlt {

Partition::Partition(std::vector<double> t, bool is_closed) : times(std::move(t)), closed(is_closed) {
    if (times.empty()) throw DomainError("partition needs at least one time");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1])) throw DomainError("partition times must be strictly increasing");
}

bool Partition::contains(double t) const { return std::binary_search(times.begin(), times.end(), t); }

bool Partition::refines(const Partition& coarse) const {
    return std::includes(times.begin(), times.end(), coarse.times.begin(), coarse.times.end());
}

Partition Partition::from_json(const json& j) { return Partition(j.get<std::vector<double>>()); }

std::string Partition::to_csv() const {
    std::ostringstream os;
    os.precision(17);
    os << "t\n";
    for (double t : times) os << t << "\n";
    return os.str();
}

Partition Partition::from_csv(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    std::vector<double> t;
    while (std::getline(is, line)) {
        if (line.empty() || line == "t" || line == "\r") continue;
        try {
            t.push_back(std::stod(line));
        } catch (const std::exception&) {
            throw DomainError("bad partition row: " + line);
        }
    }
    return Partition(std::move(t));
}

ValueGrid ValueGrid::uniform(double h) {
    if (!(h > 0)) throw DomainError("grid spacing must be positive");
    ValueGrid g;
    g.spacing = h;
    return g;
}

ValueGrid ValueGrid::explicit_levels(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    if (!std::binary_search(v.begin(), v.end(), 0.0)) throw DomainError("grid must contain the level 0");
    ValueGrid g;
    g.levels = std::move(v);
    return g;
}

double ValueGrid::level(long long j) const {
    if (is_uniform()) return static_cast<double>(j) * spacing;
    if (j < 0) return -std::numeric_limits<double>::infinity();
    if (j >= static_cast<long long>(levels.size())) return std::numeric_limits<double>::infinity();
    return levels[static_cast<std::size_t>(j)];
}

long long ValueGrid::floor_index(double v) const {
    if (is_uniform()) {
        auto j = static_cast<long long>(std::floor(v / spacing));
        while (level(j + 1) <= v) ++j;
        while (level(j) > v) --j;
        return j;
    }
    auto it = std::upper_bound(levels.begin(), levels.end(), v);
    return static_cast<long long>(it - levels.begin()) - 1;
}

json ValueGrid::to_json() const {
    if (is_uniform()) return {{"spacing", spacing}};
    return {{"levels", levels}};
}

double oscillation(const Path& x, const Partition& pi, double t) {
    double best = 0.0;
    for (std::size_t k = 0; k + 1 < pi.size(); ++k) {
        const double a = pi.times[k];
        if (a >= t) break;
        auto e = x.extremes(a, std::min(pi.times[k + 1], t));
        best = std::max(best, e.max - e.min);
    }
    return best;
}

Partition lebesgue_partition(const Path& x, const ValueGrid& grid, double horizon, double tol) {
    std::vector<double> out{0.0};
    double t = 0.0;
    double v = x.eval(0.0);
    long long j = grid.floor_index(v);
    bool on_level = grid.level(j) == v;
    while (true) {
        long long jlo = on_level ? j - 1 : j;
        long long jhi = j + 1;
        auto h = x.first_hit_any(grid.level(jlo), grid.level(jhi), t, tol);
        if (!h || h->time > horizon) break;
        double next = h->time;
        if (next <= t) {
            // touching the current time only happens through rounding; step past it
            next = std::nextafter(t, horizon);
            if (next > horizon) break;
        }
        t = next;
        j = h->which == 0 ? jlo : jhi;
        on_level = true;
        if (t >= horizon) break;
        out.push_back(t);
    }
    if (out.back() < horizon) out.push_back(horizon);
    return Partition(std::move(out));
}

Partition dyadic_partition(int n, double horizon) {
    if (n < 0) throw DomainError("dyadic order must be non-negative");
    if (!(horizon > 0)) throw DomainError("horizon must be positive");
    std::vector<double> t;
    for (std::uint64_t k = 0;; ++k) {
        double v = std::ldexp(static_cast<double>(k), -n);
        if (v >= horizon) break;
        t.push_back(v);
    }
    t.push_back(horizon);
    return Partition(std::move(t));
}

Partition merge(const Partition& a, const Partition& b) {
    std::vector<double> all;
    all.reserve(a.size() + b.size());
    std::merge(a.times.begin(), a.times.end(), b.times.begin(), b.times.end(), std::back_inserter(all));
    const double span = std::max(std::fabs(all.front()), std::fabs(all.back()));
    const double tol = std::ldexp(span, -52);
    std::vector<double> out;
    out.reserve(all.size());
    for (double t : all)
        if (out.empty() || t - out.back() > tol) out.push_back(t);
    return Partition(std::move(out), a.closed || b.closed);
}

Partition restrict(const Partition& pi, double s, double t) {
    if (s > t) throw DomainError("restrict needs s <= t");
    std::vector<double> out{s};
    for (double v : pi.times)
        if (v > s && v < t) out.push_back(v);
    if (t > s) out.push_back(t);
    return Partition(std::move(out));
}

Partition freedman_scale(const Path& x, const Partition& pi, long long k, double tol) {
    if (k < 1) throw DomainError("freedman scale needs k >= 1");
    if (k == 1) return pi;
    std::vector<double> out;
    out.reserve(pi.size() * static_cast<std::size_t>(std::min<long long>(k, 1 << 20)));
    for (std::size_t c = 0; c + 1 < pi.size(); ++c) {
        const double a = pi.times[c], b = pi.times[c + 1];
        out.push_back(a);
        const double xa = x.eval(a), xb = x.eval(b);
        if (xa == xb) continue;
        double from = a;
        for (long long i = 1; i < k; ++i) {
            double level = xa + (xb - xa) * (static_cast<double>(i) / static_cast<double>(k));
            auto tau = x.first_hit(level, from, tol);
            if (!tau) throw std::logic_error("freedman_scale: intermediate level not reached");
            double t = std::min(*tau, b);
            if (t > out.back() && t < b) out.push_back(t);
            from = t;
        }
    }
    out.push_back(pi.times.back());
    return Partition(std::move(out), pi.closed);
}

std::vector<Partition> read_partition_sequence(const json& j) {
    std::vector<Partition> out;
    for (const auto& p : j) out.push_back(Partition::from_json(p));
    return out;
}

json write_partition_sequence(const std::vector<Partition>& seq) {
    json j = json::array();
    for (const auto& p : seq) j.push_back(p.to_json());
    return j;
}

}  // namespace pathlt
