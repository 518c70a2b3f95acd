#include "pathlt/constructions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <unordered_set>

#include "pathlt/kernels.hpp"
#include "pathlt/quadvar.hpp"

namespace pathlt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double pow3(int i) {
    double p = 1.0;
    for (int k = 0; k < i; ++k) p *= 3.0;
    return p;
}

// Offset from the nearer gap end of the k-th level in a gap with m subdivisions.
double gap_offset(long long k, long long m, double len) {
    double r = static_cast<double>(k) / static_cast<double>(m);
    return 0.5 * r * r * len;
}

double gap_value(double offset) { return std::sqrt(2.0 * offset); }

}  // namespace

// ---------------------------------------------------------------- schedule

CantorSchedule CantorSchedule::constant(long long m) {
    if (m < 1) throw DomainError("cantor schedule needs m >= 1");
    CantorSchedule s;
    s.kind = Kind::constant;
    s.value = m;
    return s;
}

CantorSchedule CantorSchedule::custom(std::vector<std::vector<long long>> table) {
    for (std::size_t n = 0; n < table.size(); ++n) {
        if (table[n].size() < n + 1) throw DomainError("cantor schedule row n needs n entries");
        for (std::size_t i = 0; i < table[n].size(); ++i) {
            if (table[n][i] < 1) throw DomainError("cantor schedule needs m >= 1");
            if (n > 0 && i < table[n - 1].size() && table[n][i] < table[n - 1][i])
                throw DomainError("cantor schedule must be non-decreasing in n");
        }
    }
    CantorSchedule s;
    s.kind = Kind::custom;
    s.table = std::move(table);
    return s;
}

long long CantorSchedule::m(int i, int n) const {
    // i > n is fine for a single gap; the stage-n partition only uses i <= n
    if (i < 1 || n < 1) throw DomainError("cantor schedule needs i, n >= 1");
    switch (kind) {
    case Kind::standard:
        if (n * i > 62) throw DomainError("standard schedule count overflows");
        return 1LL << (n * i);
    case Kind::constant:
        return value;
    case Kind::custom:
        if (static_cast<std::size_t>(n) > table.size()) throw DomainError("custom schedule has no row for this stage");
        if (static_cast<std::size_t>(i) > table[static_cast<std::size_t>(n - 1)].size())
            throw DomainError("custom schedule has no entry for this level");
        return table[static_cast<std::size_t>(n - 1)][static_cast<std::size_t>(i - 1)];
    }
    return 1;
}

json CantorSchedule::to_json() const {
    switch (kind) {
    case Kind::standard:
        return {{"kind", "standard"}};
    case Kind::constant:
        return {{"kind", "constant"}, {"m", value}};
    case Kind::custom:
        return {{"kind", "custom"}, {"table", table}};
    }
    return {};
}

CantorSchedule CantorSchedule::from_json(const json& j) {
    const std::string k = j.at("kind").get<std::string>();
    if (k == "standard") return standard();
    if (k == "constant") return constant(j.at("m").get<long long>());
    if (k == "custom") return custom(j.at("table").get<std::vector<std::vector<long long>>>());
    throw DomainError("unknown cantor schedule kind: " + k);
}

// ---------------------------------------------------------------- Cantor stage

std::vector<CantorGap> cantor_gaps(int level) {
    if (level < 1 || level > 30) throw DomainError("cantor gap level must be in [1, 30]");
    const double den = pow3(level);
    const long long count = 1LL << (level - 1);
    std::vector<CantorGap> out;
    out.reserve(static_cast<std::size_t>(count));
    for (long long j = 0; j < count; ++j) {
        // ternary digits 0/2 from the bits of j, then a 1 opens the gap
        long long num = 0;
        for (int k = 1; k < level; ++k) num = 3 * num + 2 * ((j >> (level - 1 - k)) & 1);
        num = 3 * num + 1;
        CantorGap g;
        g.level = level;
        g.index = j;
        g.left = static_cast<double>(num) / den;
        g.length = 1.0 / den;
        g.peak = std::sqrt(g.length);
        out.push_back(g);
    }
    return out;
}

namespace {

std::vector<CantorGap> gaps_up_to(int n) {
    std::vector<CantorGap> all;
    for (int i = 1; i <= n; ++i) {
        auto g = cantor_gaps(i);
        all.insert(all.end(), g.begin(), g.end());
    }
    std::sort(all.begin(), all.end(), [](const CantorGap& a, const CantorGap& b) { return a.left < b.left; });
    return all;
}

}  // namespace

Partition cantor_partitions(int n, const CantorSchedule& s, std::size_t max_points) {
    if (n < 1) throw DomainError("cantor partitions need n >= 1");
    double count = 2.0;
    for (int i = 1; i <= n; ++i) count += std::ldexp(2.0 * static_cast<double>(s.m(i, n)) + 1.0, i - 1);
    if (count > static_cast<double>(max_points)) throw DomainError("cantor partition too large to materialize");
    std::vector<double> t;
    t.reserve(static_cast<std::size_t>(count));
    t.push_back(0.0);
    auto push = [&](double v) {
        if (!(v > t.back())) throw DomainError("cantor partition times collide in double precision");
        t.push_back(v);
    };
    for (const auto& g : gaps_up_to(n)) {
        const long long m = s.m(g.level, n);
        const double right = g.left + g.length;
        for (long long k = 0; k <= m; ++k) push(g.left + gap_offset(k, m, g.length));
        for (long long k = m - 1; k >= 0; --k) push(right - gap_offset(k, m, g.length));
    }
    push(1.0);
    return Partition(std::move(t));
}

double cantor_interval_qv(int i, long long j, int n, const CantorSchedule& s) {
    if (j < 0 || j >= (1LL << (i - 1))) throw DomainError("cantor gap index out of range");
    const long long m = s.m(i, n);
    const double len = 1.0 / pow3(i);
    kernels::Kahan acc;
    // rising half, then the falling half back down to the right end
    double prev = 0.0;
    for (long long k = 1; k <= m; ++k) {
        double v = gap_value(gap_offset(k, m, len));
        acc.add((v - prev) * (v - prev));
        prev = v;
    }
    for (long long k = m - 1; k >= 0; --k) {
        double v = gap_value(gap_offset(k, m, len));
        acc.add((v - prev) * (v - prev));
        prev = v;
    }
    return acc.sum;
}

double cantor_stage_qv(int n, const CantorSchedule& s, double max_cells) {
    double cells = 0.0;
    for (int i = 1; i <= n; ++i) cells += std::ldexp(2.0 * static_cast<double>(s.m(i, n)), i - 1);
    if (cells > max_cells) throw DomainError("cantor stage too large to stream");
    kernels::Kahan acc;
    for (int i = 1; i <= n; ++i) {
        // gaps of one level are translates; the offsets do not depend on j
        const double one = cantor_interval_qv(i, 0, n, s);
        for (long long j = 0; j < (1LL << (i - 1)); ++j) acc.add(one);
    }
    // cells between partitioned gaps start and end on the Cantor set, where x = 0
    return acc.sum;
}

double cantor_local_time_at(int n, const CantorSchedule& s, double u) {
    kernels::Kahan acc;
    for (int i = 1; i <= n; ++i) {
        const double len = 1.0 / pow3(i);
        const long long m = s.m(i, n);
        const double top = gap_value(gap_offset(m, m, len));
        if (!(u >= 0.0 && u < top)) continue;
        // largest k with value(k) <= u
        long long lo = 0, hi = m;
        while (hi - lo > 1) {
            long long mid = lo + (hi - lo) / 2;
            if (gap_value(gap_offset(mid, m, len)) <= u) lo = mid;
            else hi = mid;
        }
        const double a = gap_value(gap_offset(lo, m, len));
        const double b = gap_value(gap_offset(lo + 1, m, len));
        // the rising cell a -> b and the falling cell b -> a both cover u
        const double per_gap = 2.0 * std::fabs(b - u) + 2.0 * std::fabs(a - u);
        for (long long j = 0; j < (1LL << (i - 1)); ++j) acc.add(per_gap);
    }
    return acc.sum;
}

double cantor_geometric_sum(int n) {
    const double eps = 2.0 / (3.0 * std::ldexp(1.0, n));
    double sum = 0.0, p = 1.0;
    for (int i = 1; i <= n; ++i) {
        p *= eps;
        sum += p;
    }
    return sum;
}

CantorOscillation cantor_oscillation(int n, const CantorSchedule& s) {
    CantorOscillation o;
    for (int i = 1; i <= n; ++i) {
        const double len = 1.0 / pow3(i);
        const long long m = s.m(i, n);
        // levels inside a gap are monotone in k; check both ends of the ladder
        double first = gap_value(gap_offset(1, m, len)) - gap_value(0.0);
        double last = gap_value(gap_offset(m, m, len)) - gap_value(gap_offset(m - 1, m, len));
        o.in_gaps = std::max({o.in_gaps, first, last});
    }
    auto x = cantor_path();
    double prev = 0.0;
    for (const auto& g : gaps_up_to(n)) {
        if (g.left > prev) {
            auto e = x.extremes(prev, g.left);
            o.between = std::max(o.between, e.max - e.min);
        }
        prev = g.left + g.length;
    }
    auto e = x.extremes(prev, 1.0);
    o.between = std::max(o.between, e.max - e.min);
    o.total = std::max(o.in_gaps, o.between);
    return o;
}

// ---------------------------------------------------------------- blow-up

double vitali_psi(double y) {
    y = std::fabs(y);
    if (y == 0.0) return 0.0;
    if (y >= std::exp(-1.0)) return kInf;
    return y * y / (2.0 * std::log(std::log(1.0 / y)));
}

std::vector<std::size_t> extrema_merge(const std::vector<double>& v) {
    std::vector<std::size_t> st;
    if (v.empty()) return st;
    st.push_back(0);
    auto sq = [](double a) { return a * a; };
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (st.size() >= 2 && (v[st.back()] - v[st[st.size() - 2]]) * (v[i] - v[st.back()]) >= 0.0)
            st.back() = i;
        else
            st.push_back(i);
        while (st.size() >= 4) {
            const std::size_t n = st.size();
            const double a = v[st[n - 4]], b = v[st[n - 3]], c = v[st[n - 2]], d = v[st[n - 1]];
            if (sq(d - a) < sq(b - a) + sq(c - b) + sq(d - c)) break;
            st.erase(st.end() - 3, st.end() - 1);
            const std::size_t k = st.size();
            if (k >= 3 && (v[st[k - 2]] - v[st[k - 3]]) * (v[st[k - 1]] - v[st[k - 2]]) >= 0.0)
                st.erase(st.end() - 2);
        }
    }
    if (st.back() != v.size() - 1) st.push_back(v.size() - 1);
    return st;
}

json BlowupResult::to_json() const {
    json h = json::array();
    for (const auto& [d, a] : history) h.push_back({{"depth", d}, {"achieved", a}});
    return {{"achieved", achieved}, {"status", status}, {"depth", depth}, {"points", partition.size()}, {"history", h}};
}

namespace {

double sum_sq(const std::vector<double>& v) { return v.size() < 2 ? 0.0 : kernels::sq_increment_sum(v.data(), v.size()); }

BlowupResult blowup_analytic(const Path& x, double c, double d, double target) {
    auto tp = x.turning_points(c, d);
    if (!tp) throw UnsupportedError("blow-up needs a bridge path or a piecewise monotone analytic path");
    std::vector<double> t{c};
    for (double s : *tp) t.push_back(s);
    t.push_back(d);
    auto v = x.eval_many(t);
    // the supremum over partitions is attained on turning points: quadratic DP
    const std::size_t K = t.size();
    std::vector<double> best(K, -1.0);
    std::vector<std::size_t> from(K, 0);
    best[0] = 0.0;
    for (std::size_t j = 1; j < K; ++j)
        for (std::size_t i = 0; i < j; ++i) {
            double cand = best[i] + (v[j] - v[i]) * (v[j] - v[i]);
            if (cand > best[j]) {
                best[j] = cand;
                from[j] = i;
            }
        }
    std::vector<double> pts;
    for (std::size_t j = K - 1;; j = from[j]) {
        pts.push_back(t[j]);
        if (j == 0) break;
    }
    std::reverse(pts.begin(), pts.end());
    BlowupResult r;
    r.partition = Partition(pts);
    r.achieved = sum_sq(x.eval_many(pts));
    r.status = r.achieved >= target ? "achieved" : "saturated";
    r.history.emplace_back(0, r.achieved);
    return r;
}

struct Sampled {
    std::vector<double> t, v;
};

// Dyadic samples of [c, d] at depth m, with the interval ends added.
Sampled sample_window(const Path& x, double c, double d, int m) {
    const double T = x.horizon();
    auto k0 = static_cast<std::uint64_t>(std::ceil(std::ldexp(c / T, m)));
    auto k1 = static_cast<std::uint64_t>(std::floor(std::ldexp(d / T, m)));
    Sampled s;
    s.t.push_back(c);
    s.v.push_back(x.eval(c));
    if (k1 >= k0) {
        auto w = x.window_values(m, k0, k1);
        for (std::uint64_t k = k0; k <= k1; ++k) {
            double tk = std::ldexp(static_cast<double>(k), -m) * T;
            if (tk <= s.t.back() || tk >= d) continue;
            s.t.push_back(tk);
            s.v.push_back(w[k - k0]);
        }
    }
    s.t.push_back(d);
    s.v.push_back(x.eval(d));
    return s;
}

int default_start_depth(double width, double T) { return std::max(0, static_cast<int>(std::ceil(std::log2(T / width)))) + 4; }

constexpr std::uint64_t kWindowCap = std::uint64_t{1} << 24;

bool window_fits(double width, double T, int m) { return std::ldexp(width / T, m) <= static_cast<double>(kWindowCap); }

}  // namespace

BlowupResult blowup_partition(const Path& x, double c, double d, double target, int budget_depth,
                              BlowupStrategy strategy, int start_depth) {
    if (!(c >= 0.0 && d > c && d <= x.horizon())) throw DomainError("blow-up interval must satisfy 0 <= c < d <= T");
    if (!(target > 0.0)) throw DomainError("blow-up target must be positive");
    if (x.analytic()) return blowup_analytic(x, c, d, target);

    const double T = x.horizon();
    const int m0 = start_depth >= 0 ? start_depth : std::min(budget_depth, default_start_depth(d - c, T));
    BlowupResult r;
    r.partition = Partition({c, d});
    r.achieved = sum_sq({x.eval(c), x.eval(d)});
    r.status = "budget";

    // vitali state: selected dyadic cells as (depth, index)
    std::unordered_set<std::uint64_t> chosen;
    std::vector<std::pair<int, std::uint64_t>> chosen_list;
    auto key = [](int m, std::uint64_t k) { return (static_cast<std::uint64_t>(m) << 56) ^ k; };

    for (int m = m0; m <= budget_depth; ++m) {
        if (!window_fits(d - c, T, m)) break;
        auto s = sample_window(x, c, d, m);
        std::vector<double> pts, vals;
        if (strategy == BlowupStrategy::extrema) {
            for (std::size_t i : extrema_merge(s.v)) {
                pts.push_back(s.t[i]);
                vals.push_back(s.v[i]);
            }
        } else {
            const double h = std::ldexp(T, -m);
            const auto k0 = static_cast<std::uint64_t>(std::ceil(std::ldexp(c / T, m)));
            // s.t[1..] are the grid points k0, k0+1, ... inside (c, d)
            for (std::size_t i = 1; i + 2 < s.t.size(); ++i) {
                const std::uint64_t k = k0 + (i - 1) + (s.t[1] == std::ldexp(static_cast<double>(k0), -m) * T ? 0 : 1);
                bool inside = false;
                for (int up = 1; up <= m - m0 && !inside; ++up) inside = chosen.count(key(m - up, k >> up)) > 0;
                if (inside) continue;
                if (vitali_psi(s.v[i + 1] - s.v[i]) >= 0.9 * h) {
                    chosen.insert(key(m, k));
                    chosen_list.emplace_back(m, k);
                }
            }
            pts.push_back(c);
            for (const auto& [mm, k] : chosen_list) {
                pts.push_back(std::ldexp(static_cast<double>(k), -mm) * T);
                pts.push_back(std::ldexp(static_cast<double>(k + 1), -mm) * T);
            }
            pts.push_back(d);
            std::sort(pts.begin(), pts.end());
            pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
            vals = x.eval_many(pts);
        }
        double achieved = sum_sq(vals);
        if (achieved > r.achieved) {
            r.achieved = achieved;
            r.partition = Partition(pts);
            r.depth = m;
        }
        r.history.emplace_back(m, r.achieved);
        if (r.achieved >= target) {
            r.status = "achieved";
            break;
        }
    }
    return r;
}

// ---------------------------------------------------------------- targeting

double qv_metric(double a, double b) { return std::fabs(std::exp(-a) - std::exp(-b)); }

TargetSchedule TargetSchedule::zero(double horizon) {
    TargetSchedule s;
    s.times = {0.0, horizon};
    s.values = {0.0, 0.0};
    return s;
}

TargetSchedule TargetSchedule::linear(double slope, double horizon) {
    if (!(slope >= 0.0)) throw DomainError("target slope must be non-negative");
    TargetSchedule s;
    s.times = {0.0, horizon};
    s.values = {0.0, slope * horizon};
    return s;
}

TargetSchedule TargetSchedule::qv_curve(const Path& x, const Partition& pi) {
    TargetSchedule s;
    auto v = x.eval_many(pi.times);
    s.times = pi.times;
    s.values.assign(v.size(), 0.0);
    kernels::Kahan acc;
    for (std::size_t j = 1; j < v.size(); ++j) {
        acc.add((v[j] - v[j - 1]) * (v[j] - v[j - 1]));
        s.values[j] = acc.sum;
    }
    return s;
}

double TargetSchedule::operator()(double t) const {
    double base = values.back();
    auto it = std::upper_bound(times.begin(), times.end(), t);
    if (it == times.begin()) {
        base = values.front();
    } else if (it != times.end()) {
        std::size_t i = static_cast<std::size_t>(it - times.begin()) - 1;
        if (t == times[i]) base = values[i];
        else if (std::isinf(values[i + 1])) base = kInf;
        else base = values[i] + (values[i + 1] - values[i]) * ((t - times[i]) / (times[i + 1] - times[i]));
    }
    for (const auto& [s, size] : jumps)
        if (s <= t) base += size;
    return base;
}

std::vector<double> TargetSchedule::jump_times(double threshold) const {
    std::vector<double> out;
    for (const auto& [s, size] : jumps)
        if (size > threshold) out.push_back(s);
    std::sort(out.begin(), out.end());
    return out;
}

void TargetSchedule::validate() const {
    if (times.size() < 1 || times.size() != values.size()) throw DomainError("target schedule needs matching checkpoints");
    if (times.front() != 0.0 || values.front() != 0.0) throw DomainError("target schedule must start at a(0) = 0");
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (!(times[i] > times[i - 1])) throw DomainError("target checkpoint times must increase");
        if (!(values[i] >= values[i - 1])) throw DomainError("target values must be non-decreasing");
    }
    for (const auto& [s, size] : jumps)
        if (!(s > 0.0) || !(size > 0.0)) throw DomainError("target jumps need positive time and size");
}

json TargetSchedule::to_json() const {
    json cp = json::array(), jp = json::array();
    for (std::size_t i = 0; i < times.size(); ++i) cp.push_back({times[i], std::isinf(values[i]) ? json(nullptr) : json(values[i])});
    for (const auto& [s, size] : jumps) jp.push_back({s, size});
    return {{"checkpoints", cp}, {"jumps", jp}};
}

TargetSchedule TargetSchedule::from_json(const json& j) {
    TargetSchedule s;
    if (j.contains("linear")) {
        s = linear(j.at("linear").get<double>(), j.value("horizon", 1.0));
    } else {
        for (const auto& p : j.at("checkpoints")) {
            s.times.push_back(p.at(0).get<double>());
            s.values.push_back(p.at(1).is_null() ? kInf : p.at(1).get<double>());
        }
    }
    if (j.contains("jumps"))
        for (const auto& p : j.at("jumps")) s.jumps.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
    s.validate();
    return s;
}

json TargetCell::to_json() const {
    return {{"c", c},
            {"d", d},
            {"target", std::isinf(target) ? json("inf") : json(target)},
            {"achieved", achieved},
            {"error", error},
            {"status", status},
            {"source", source},
            {"depth", depth}};
}

json TargetResult::to_json() const {
    json cj = json::array();
    for (const auto& c : cells) cj.push_back(c.to_json());
    return {{"points", partition.size()}, {"sup_error", sup_error}, {"achieved", achieved}, {"cells", cj}};
}

std::string TargetResult::to_csv() const {
    std::ostringstream os;
    os.precision(17);
    os << "t,qv,target,d\n";
    for (std::size_t i = 0; i < anchors.size(); ++i)
        os << anchors[i] << ',' << anchor_qv[i] << ',' << anchor_target[i] << ','
           << qv_metric(anchor_qv[i], anchor_target[i]) << '\n';
    return os.str();
}

namespace {

struct Candidate {
    std::vector<double> t, v;
    std::string source;
    int depth = 0;
};

struct Trim {
    std::vector<double> t;
    double achieved = 0.0;
    bool ok = false;
};

// Split [a, b] at the first hits of x_a + f_i (x_b - x_a) for increasing
// fractions f_i. Consecutive hits bound monotone-level increments, so the
// squared sum is sum (f_{i+1} - f_i)^2 (x_b - x_a)^2 up to the hit tolerance.
std::vector<double> split_at_levels(const Path& x, double a, double b, const std::vector<double>& frac) {
    const double xa = x.eval(a), xb = x.eval(b);
    std::vector<double> out;
    double from = a;
    for (double f : frac) {
        auto tau = x.first_hit(xa + (xb - xa) * f, from);
        if (!tau) throw std::logic_error("level split: intermediate level not reached");
        double t = std::min(*tau, b);
        if (t > from && t < b) out.push_back(t);
        from = std::max(from, t);
    }
    out.push_back(b);
    return out;
}

// Fractions for one piece of share alpha followed by k-1 equal pieces, with
// alpha^2 + (1-alpha)^2/(k-1) = rho. Needs 1/k <= rho <= 1.
std::vector<double> split_fractions(double rho) {
    if (rho >= 1.0) return {};
    const auto k = static_cast<long long>(std::ceil(1.0 / rho));
    const double kk = static_cast<double>(k);
    const double disc = std::max(0.0, 1.0 - kk + kk * (kk - 1.0) * rho);
    const double alpha = std::min(1.0, (1.0 + std::sqrt(disc)) / kk);
    std::vector<double> f{alpha};
    for (long long i = 1; i < k - 1; ++i) f.push_back(alpha + (1.0 - alpha) * static_cast<double>(i) / (kk - 1.0));
    return f;
}

// Keep whole sub-cells while they fit the remaining target, split the first
// one that does not so that it contributes the remainder, then flatten what
// is left with Freedman division. Base points in the tail stay as cell ends.
Trim greedy_trim(const Path& x, const Candidate& cand, const std::vector<double>& keep, double target, double delta) {
    Trim out;
    out.t.push_back(cand.t.front());
    double r = target;
    std::size_t i = 0;
    const std::size_t K = cand.t.size() - 1;
    for (; i < K && r > delta / 4; ++i) {
        const double q = (cand.v[i + 1] - cand.v[i]) * (cand.v[i + 1] - cand.v[i]);
        if (q <= r + delta / 8) {
            out.t.push_back(cand.t[i + 1]);
            r -= q;
            continue;
        }
        auto pts = split_at_levels(x, cand.t[i], cand.t[i + 1], split_fractions(r / q));
        std::vector<double> seg{cand.t[i]};
        seg.insert(seg.end(), pts.begin(), pts.end());
        r -= sum_sq(x.eval_many(seg));
        out.t.insert(out.t.end(), pts.begin(), pts.end());
    }
    if (r <= delta / 4) {
        const double s = out.t.back();
        const double d = cand.t.back();
        if (s < d) {
            std::vector<double> tail{s};
            for (double b : keep)
                if (b > s && b < d) tail.push_back(b);
            tail.push_back(d);
            auto tv = x.eval_many(tail);
            const double budget = std::max(r, 0.0) + delta / 4;
            const double cells = static_cast<double>(tail.size() - 1);
            for (std::size_t j = 0; j + 1 < tail.size(); ++j) {
                const double q = (tv[j + 1] - tv[j]) * (tv[j + 1] - tv[j]);
                auto k = std::max<long long>(1, static_cast<long long>(std::ceil(q * cells / budget)));
                auto f = freedman_scale(x, Partition({tail[j], tail[j + 1]}), k);
                out.t.insert(out.t.end(), f.times.begin() + 1, f.times.end());
            }
        }
    }
    out.achieved = sum_sq(x.eval_many(out.t));
    out.ok = out.t.back() == cand.t.back() && std::fabs(out.achieved - target) <= delta / 2;
    return out;
}

Candidate with_points(const Path& x, std::vector<double> t, const std::vector<double>& keep, std::string source, int depth) {
    t.insert(t.end(), keep.begin(), keep.end());
    std::sort(t.begin(), t.end());
    t.erase(std::unique(t.begin(), t.end()), t.end());
    Candidate c;
    c.v = x.eval_many(t);
    c.t = std::move(t);
    c.source = std::move(source);
    c.depth = depth;
    return c;
}

TargetCell target_cell(const Path& x, double c, double d, double target, const std::vector<double>& keep, double delta,
                       int budget, std::vector<double>& points) {
    TargetCell cell;
    cell.c = c;
    cell.d = d;
    cell.target = target;
    const double T = x.horizon();

    Trim best;
    double best_gap = kInf;
    Candidate best_cand;
    double max_q = -1.0;
    bool done = false;

    auto attempt = [&](const Candidate& cand) {
        const double q = sum_sq(cand.v);
        if (q > max_q) {
            max_q = q;
            best_cand = cand;
        }
        if (std::isinf(target) || q < target - delta / 4) return;
        auto trim = greedy_trim(x, cand, keep, target, delta);
        const double gap = std::fabs(trim.achieved - target);
        if (trim.t.back() == d && gap < best_gap) {
            best_gap = gap;
            best = trim;
            cell.source = cand.source;
            cell.depth = cand.depth;
        }
        done = trim.ok;
    };

    attempt(with_points(x, {}, keep, "base", 0));
    const int m0 = std::max(0, static_cast<int>(std::ceil(std::log2(T / (d - c))))) + 1;
    if (x.analytic()) {
        for (int m = m0; !done && m <= std::min(budget, m0 + 12); ++m) {
            auto s = sample_window(x, c, d, m);
            attempt(with_points(x, s.t, keep, "dyadic", m));
        }
        if (!done) {
            auto b = blowup_partition(x, c, d, std::isinf(target) ? 1e300 : std::max(target, 1e-300), budget);
            attempt(with_points(x, b.partition.times, keep, "extrema", 0));
        }
    } else {
        for (int m = m0; !done && m <= std::min(budget, m0 + 10) && window_fits(d - c, T, m); ++m) {
            auto s = sample_window(x, c, d, m);
            attempt(with_points(x, s.t, keep, "dyadic", m));
        }
        for (int m = m0 + 2; !done && m <= budget; ++m) {
            if (!window_fits(d - c, T, m)) break;
            auto b = blowup_partition(x, c, d, 1.0, m, BlowupStrategy::extrema, m);
            attempt(with_points(x, b.partition.times, keep, "extrema", m));
        }
    }

    std::vector<double> chosen;
    if (done || best_gap < kInf) {
        chosen = best.t;
        cell.achieved = best.achieved;
        cell.status = done ? "achieved" : "short";
    } else {
        // nothing reached the target: keep the largest candidate whole
        chosen = best_cand.t;
        cell.achieved = max_q;
        cell.source = best_cand.source;
        cell.depth = best_cand.depth;
        cell.status = "saturated";
    }
    cell.error = qv_metric(cell.achieved, target);
    points.insert(points.end(), chosen.begin() + 1, chosen.end());
    return cell;
}

}  // namespace

TargetResult target_qv_partitions(const Path& x, const TargetSchedule& a, int n, const Partition& base, TargetOptions opt) {
    a.validate();
    if (n < 0) throw DomainError("stage must be non-negative");
    const double T = x.horizon();
    if (base.start() != 0.0 || base.end() != T) throw DomainError("base partition must span [0, T]");
    std::vector<double> jumps = a.jump_times(n > 0 ? 1.0 / n : 0.0);
    Partition anchors = merge(base, dyadic_partition(n, T));
    if (!jumps.empty()) {
        std::vector<double> jt{0.0};
        for (double s : jumps)
            if (s > 0.0 && s < T) jt.push_back(s);
        jt.push_back(T);
        anchors = merge(anchors, Partition(jt));
    }
    const double total = opt.tolerance > 0 ? opt.tolerance : std::ldexp(1.0, -n);
    const double delta = total / static_cast<double>(anchors.cells());

    TargetResult res;
    std::vector<double> points{0.0};
    std::size_t b = 0;
    for (std::size_t i = 0; i + 1 < anchors.size(); ++i) {
        const double c = anchors.times[i], d = anchors.times[i + 1];
        std::vector<double> keep;
        while (b < base.size() && base.times[b] < c) ++b;
        for (std::size_t j = b; j < base.size() && base.times[j] <= d; ++j) keep.push_back(base.times[j]);
        if (keep.empty() || keep.front() != c) keep.insert(keep.begin(), c);
        if (keep.back() != d) keep.push_back(d);
        const double ac = a(c), ad = a(d);
        const double inc = std::isinf(ac) ? 0.0 : ad - ac;
        res.cells.push_back(target_cell(x, c, d, inc, keep, delta, opt.budget_depth, points));
        if (res.cells.back().status != "achieved") res.achieved = false;
    }
    res.partition = Partition(points);

    res.anchors = anchors.times;
    kernels::Kahan acc;
    res.anchor_qv.push_back(0.0);
    res.anchor_target.push_back(a(0.0));
    for (std::size_t i = 0; i < res.cells.size(); ++i) {
        acc.add(res.cells[i].achieved);
        res.anchor_qv.push_back(acc.sum);
        res.anchor_target.push_back(a(anchors.times[i + 1]));
    }
    for (std::size_t i = 0; i < res.anchors.size(); ++i)
        res.sup_error = std::max(res.sup_error, qv_metric(res.anchor_qv[i], res.anchor_target[i]));
    return res;
}

}  // namespace pathlt
