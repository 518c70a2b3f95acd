#include "pathlt/path.hpp"

#include <algorithm>
#include <atomic>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>

#include "pathlt/rng.hpp"

namespace pathlt {

namespace {

// A skipped cell could still reach the level with probability below e^-kTail
// (Brownian bridge maximum tail).
constexpr double kTail = 45.0;
// Extremes only lose a negligible overshoot when a pruned cell exceeds the
// bound, so they use a looser one.
constexpr double kTailExtremes = 30.0;
constexpr std::uint32_t kRootLevel = 0xffffu;

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) out.push_back(cur);
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

std::vector<double> parse_doubles(const std::string& s, char sep = ',') {
    std::vector<double> out;
    for (const auto& tok : split(s, sep)) {
        if (tok.empty()) continue;
        out.push_back(std::stod(tok));
    }
    return out;
}

}  // namespace

// ---------------------------------------------------------------- TimeMap

TimeMap TimeMap::identity(double horizon) {
    TimeMap m;
    m.kind = Kind::identity;
    m.horizon = horizon;
    return m;
}

TimeMap TimeMap::power(double p, double horizon) {
    if (!(p > 0)) throw DomainError("time map exponent must be positive");
    TimeMap m;
    m.kind = Kind::power;
    m.exponent = p;
    m.horizon = horizon;
    return m;
}

TimeMap TimeMap::poly(std::vector<double> w, double horizon) {
    double total = 0.0;
    for (double v : w) {
        if (v < 0) throw DomainError("time map weights must be non-negative");
        total += v;
    }
    if (!(total > 0)) throw DomainError("time map weights must not all vanish");
    for (double& v : w) v /= total;
    TimeMap m;
    m.kind = Kind::poly;
    m.weights = std::move(w);
    m.horizon = horizon;
    return m;
}

double TimeMap::operator()(double t) const {
    switch (kind) {
        case Kind::identity:
            return t;
        case Kind::power:
            if (t <= 0) return 0.0;
            if (t >= horizon) return horizon;
            return horizon * std::pow(t / horizon, exponent);
        case Kind::poly: {
            if (t <= 0) return 0.0;
            if (t >= horizon) return horizon;
            double s = t / horizon;
            double acc = 0.0;
            for (std::size_t k = weights.size(); k-- > 0;) acc = acc * s + weights[k];
            return horizon * (acc * s);
        }
    }
    return t;
}

double TimeMap::inverse(double s) const {
    if (kind == Kind::identity) return s;
    if (s <= 0) return 0.0;
    if (s >= horizon) return horizon;
    if (kind == Kind::power) return horizon * std::pow(s / horizon, 1.0 / exponent);
    double lo = 0.0, hi = horizon;
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if ((*this)(mid) < s) lo = mid; else hi = mid;
    }
    return hi;
}

json TimeMap::to_json() const {
    switch (kind) {
        case Kind::identity: return {{"kind", "identity"}, {"horizon", horizon}};
        case Kind::power: return {{"kind", "power"}, {"exponent", exponent}, {"horizon", horizon}};
        case Kind::poly: return {{"kind", "poly"}, {"weights", weights}, {"horizon", horizon}};
    }
    return {};
}

TimeMap TimeMap::from_json(const json& j) {
    std::string k = j.at("kind");
    double T = j.value("horizon", 1.0);
    if (k == "identity") return identity(T);
    if (k == "power") return power(j.at("exponent").get<double>(), T);
    if (k == "poly") return poly(j.at("weights").get<std::vector<double>>(), T);
    throw DomainError("unknown time map kind: " + k);
}

// --------------------------------------------------------------- ValueMap

ValueMap ValueMap::affine(double a, double b) {
    if (a == 0) throw DomainError("affine map needs a non-zero slope");
    ValueMap m;
    m.kind = Kind::affine;
    m.a = a;
    m.b = b;
    return m;
}

ValueMap ValueMap::exp(double rate) {
    if (rate == 0) throw DomainError("exp map needs a non-zero rate");
    ValueMap m;
    m.kind = Kind::exp;
    m.a = rate;
    return m;
}

ValueMap ValueMap::logistic(double rate, double centre) {
    if (rate == 0) throw DomainError("logistic map needs a non-zero rate");
    ValueMap m;
    m.kind = Kind::logistic;
    m.a = rate;
    m.b = centre;
    return m;
}

double ValueMap::operator()(double u) const {
    switch (kind) {
        case Kind::affine: return a * u + b;
        case Kind::exp: return std::exp(a * u);
        case Kind::logistic: return 1.0 / (1.0 + std::exp(-a * (u - b)));
    }
    return u;
}

double ValueMap::d1(double u) const {
    switch (kind) {
        case Kind::affine: return a;
        case Kind::exp: return a * std::exp(a * u);
        case Kind::logistic: {
            double s = (*this)(u);
            return a * s * (1.0 - s);
        }
    }
    return 1.0;
}

double ValueMap::d2(double u) const {
    switch (kind) {
        case Kind::affine: return 0.0;
        case Kind::exp: return a * a * std::exp(a * u);
        case Kind::logistic: {
            double s = (*this)(u);
            return a * a * s * (1.0 - s) * (1.0 - 2.0 * s);
        }
    }
    return 0.0;
}

double ValueMap::inverse(double y) const {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    switch (kind) {
        case Kind::affine: return (y - b) / a;
        case Kind::exp: return y > 0 ? std::log(y) / a : nan;
        case Kind::logistic: return (y > 0 && y < 1) ? b + std::log(y / (1.0 - y)) / a : nan;
    }
    return nan;
}

bool ValueMap::increasing() const { return a > 0; }

json ValueMap::to_json() const {
    switch (kind) {
        case Kind::affine: return {{"kind", "affine"}, {"a", a}, {"b", b}};
        case Kind::exp: return {{"kind", "exp"}, {"rate", a}};
        case Kind::logistic: return {{"kind", "logistic"}, {"rate", a}, {"centre", b}};
    }
    return {};
}

ValueMap ValueMap::from_json(const json& j) {
    std::string k = j.at("kind");
    if (k == "affine") return affine(j.at("a").get<double>(), j.value("b", 0.0));
    if (k == "exp") return exp(j.value("rate", 1.0));
    if (k == "logistic") return logistic(j.value("rate", 1.0), j.value("centre", 0.0));
    throw DomainError("unknown value map kind: " + k);
}

// --------------------------------------------------------------- PathImpl

void PathImpl::eval_many(const double* t, std::size_t n, double* out) const {
    for (std::size_t i = 0; i < n; ++i) out[i] = eval(t[i]);
}

void PathImpl::refine_to(double, double, int) const {
    throw UnsupportedError("refine_to is only defined for bridge paths");
}

std::vector<double> PathImpl::dyadic_values(int n) const {
    const std::size_t count = (std::size_t{1} << n) + 1;
    std::vector<double> out(count);
    for (std::size_t k = 0; k < count; ++k) out[k] = eval(std::ldexp(static_cast<double>(k), -n) * horizon());
    return out;
}

std::optional<std::vector<double>> PathImpl::turning_points(double, double) const { return std::nullopt; }

std::vector<double> PathImpl::window_values(int n, std::uint64_t k0, std::uint64_t k1) const {
    std::vector<double> out(k1 - k0 + 1);
    for (std::uint64_t k = k0; k <= k1; ++k)
        out[k - k0] = eval(std::min(horizon(), std::ldexp(static_cast<double>(k), -n) * horizon()));
    return out;
}

// ------------------------------------------------------------------- Path

double Path::eval(double t) const {
    if (!(t >= 0.0 && t <= horizon())) throw DomainError("time outside the horizon");
    return impl_->eval(t);
}

std::vector<double> Path::eval_many(const std::vector<double>& times) const {
    for (double t : times)
        if (!(t >= 0.0 && t <= horizon())) throw DomainError("time outside the horizon");
    std::vector<double> out(times.size());
    impl_->eval_many(times.data(), times.size(), out.data());
    return out;
}

Extremes Path::extremes(double s, double t) const {
    if (!(s >= 0.0 && s <= t && t <= horizon())) throw DomainError("bad interval for extremes");
    return impl_->extremes(s, t);
}

std::optional<double> Path::first_hit(double level, double from, double tol) const {
    auto h = first_hit_any(level, level, from, tol);
    if (!h) return std::nullopt;
    return h->time;
}

std::optional<Hit> Path::first_hit_any(double lo, double hi, double from, double tol) const {
    if (tol == 0.0 || std::isnan(tol)) throw DomainError("hit tolerance must be positive");
    if (!(from >= 0.0 && from <= horizon())) throw DomainError("search start outside the horizon");
    if (lo > hi) std::swap(lo, hi);
    return impl_->first_hit_any(lo, hi, from);
}

void Path::refine_to(double s, double t, int depth) const {
    if (!(s >= 0.0 && s <= t && t <= horizon())) throw DomainError("bad interval for refine_to");
    impl_->refine_to(s, t, depth);
}

std::vector<double> Path::window_values(int n, std::uint64_t k0, std::uint64_t k1) const {
    if (n < 0 || n > 52) throw DomainError("dyadic depth out of range");
    if (k1 < k0 || k1 > (std::uint64_t{1} << n)) throw DomainError("dyadic window out of range");
    if (k1 - k0 > (std::uint64_t{1} << 26)) throw DomainError("dyadic window too large");
    return impl_->window_values(n, k0, k1);
}

std::vector<double> Path::dyadic_values(int n) const {
    if (n < 0 || n > 30) throw DomainError("dyadic depth out of range");
    return impl_->dyadic_values(n);
}

// -------------------------------------------------------- piecewise linear

namespace {

class PiecewiseLinear final : public PathImpl {
public:
    PiecewiseLinear(std::vector<double> t, std::vector<double> x, std::string formula, json params)
        : t_(std::move(t)), x_(std::move(x)), formula_(std::move(formula)), params_(std::move(params)) {
        if (t_.size() < 2 || t_.size() != x_.size()) throw DomainError("piecewise linear path needs >= 2 knots");
        if (t_.front() != 0.0) throw DomainError("first knot must be at time 0");
        for (std::size_t i = 1; i < t_.size(); ++i)
            if (!(t_[i] > t_[i - 1])) throw DomainError("knot times must increase");
    }

    double horizon() const override { return t_.back(); }
    std::string kind() const override { return "analytic"; }

    std::optional<std::vector<double>> turning_points(double s, double t) const override {
        std::vector<double> out;
        double prev = 0.0;  // sign of the last non-flat segment
        for (std::size_t i = 0; i + 1 < t_.size(); ++i) {
            double dir = x_[i + 1] > x_[i] ? 1.0 : (x_[i + 1] < x_[i] ? -1.0 : 0.0);
            if (dir == 0.0) continue;
            if (prev != 0.0 && dir != prev && t_[i] > s && t_[i] < t) out.push_back(t_[i]);
            prev = dir;
        }
        return out;
    }

    std::size_t segment(double t) const {
        auto it = std::upper_bound(t_.begin(), t_.end(), t);
        std::size_t i = it == t_.begin() ? 0 : static_cast<std::size_t>(it - t_.begin()) - 1;
        return std::min(i, t_.size() - 2);
    }

    double eval(double t) const override {
        std::size_t i = segment(t);
        if (t == t_[i]) return x_[i];
        if (t == t_[i + 1]) return x_[i + 1];
        return x_[i] + (x_[i + 1] - x_[i]) * ((t - t_[i]) / (t_[i + 1] - t_[i]));
    }

    Extremes extremes(double s, double t) const override {
        double a = eval(s), b = eval(t);
        Extremes e{std::min(a, b), std::max(a, b)};
        auto it = std::upper_bound(t_.begin(), t_.end(), s);
        for (; it != t_.end() && *it < t; ++it) {
            double v = x_[static_cast<std::size_t>(it - t_.begin())];
            e.min = std::min(e.min, v);
            e.max = std::max(e.max, v);
        }
        return e;
    }

    std::optional<Hit> first_hit_any(double lo, double hi, double from) const override {
        std::size_t i = segment(from);
        double s0 = from;
        double v0 = eval(from);
        for (; i + 1 < t_.size(); ++i) {
            double v1 = x_[i + 1];
            std::optional<Hit> best;
            const double levels[2] = {lo, hi};
            for (int w = 0; w < (lo == hi ? 1 : 2); ++w) {
                double y = levels[w];
                if ((v0 - y) * (v1 - y) > 0) continue;
                double tau;
                if (v0 == y || v1 == v0) {
                    tau = s0;
                } else if (v1 == y) {
                    tau = t_[i + 1];
                } else {
                    tau = t_[i] + (y - x_[i]) / (x_[i + 1] - x_[i]) * (t_[i + 1] - t_[i]);
                    tau = std::clamp(tau, s0, t_[i + 1]);
                }
                if (!best || tau < best->time) best = Hit{tau, w};
            }
            if (best) return best;
            s0 = t_[i + 1];
            v0 = v1;
        }
        return std::nullopt;
    }

    json spec() const override {
        return {{"kind", "analytic"}, {"formula", formula_}, {"parameters", params_}, {"horizon", horizon()}};
    }

private:
    std::vector<double> t_, x_;
    std::string formula_;
    json params_;
};

// ------------------------------------------------------------------ Cantor

std::optional<double> cantor_seg_hit(double y, double from, double lo, double len, int depth) {
    const double hi = lo + len;
    if (hi < from) return std::nullopt;
    if (y > 0 && y * y > len / 3.0) return std::nullopt;
    if (y == 0 && lo >= from) return lo;
    if (depth >= 60) return y == 0 ? std::optional<double>(std::max(lo, from)) : std::nullopt;
    const double third = len / 3.0;
    if (auto r = cantor_seg_hit(y, from, lo, third, depth + 1)) return r;
    const double gl = lo + third, gr = lo + 2.0 * third;
    if (y == 0) {
        if (gr >= from) return gr;
    } else {
        const double half = 0.5 * y * y;
        if (half <= 0.5 * third) {
            const double up = gl + half, down = gr - half;
            if (up >= from) return up;
            if (down >= from) return down;
        }
    }
    return cantor_seg_hit(y, from, gr, third, depth + 1);
}

double tent_value(double gl, double gr, double p) { return std::sqrt(2.0 * std::max(0.0, std::min(p - gl, gr - p))); }

void cantor_seg_max(double s, double t, double lo, double len, int depth, double& best) {
    const double hi = lo + len;
    if (hi < s || lo > t) return;
    if (std::sqrt(len / 3.0) <= best || depth >= 60) return;
    const double third = len / 3.0;
    cantor_seg_max(s, t, lo, third, depth + 1, best);
    const double gl = lo + third, gr = lo + 2.0 * third;
    const double a = std::max(gl, s), b = std::min(gr, t);
    if (a <= b) {
        const double m = 0.5 * (gl + gr);
        double v;
        if (a <= m && m <= b) v = std::sqrt(third);
        else v = std::max(tent_value(gl, gr, a), tent_value(gl, gr, b));
        best = std::max(best, v);
    }
    cantor_seg_max(s, t, gr, third, depth + 1, best);
}

class CantorImpl final : public PathImpl {
public:
    double horizon() const override { return 1.0; }
    std::string kind() const override { return "analytic"; }
    double eval(double t) const override { return std::sqrt(2.0 * cantor_distance(t)); }

    Extremes extremes(double s, double t) const override {
        double a = eval(s), b = eval(t);
        double best = std::max(a, b);
        cantor_seg_max(s, t, 0.0, 1.0, 0, best);
        double mn = std::min(a, b);
        auto z = cantor_seg_hit(0.0, s, 0.0, 1.0, 0);
        if (z && *z <= t) mn = 0.0;
        return {mn, best};
    }

    std::optional<Hit> first_hit_any(double lo, double hi, double from) const override {
        std::optional<Hit> best;
        const double levels[2] = {lo, hi};
        for (int w = 0; w < (lo == hi ? 1 : 2); ++w) {
            double y = levels[w];
            if (y < 0) continue;
            // the search works on the tent geometry; re-check the start point
            if (eval(from) == y) return Hit{from, w};
            auto r = cantor_seg_hit(y, from, 0.0, 1.0, 0);
            if (r && (!best || *r < best->time)) best = Hit{*r, w};
        }
        return best;
    }

    json spec() const override {
        return {{"kind", "analytic"}, {"formula", "cantor"}, {"parameters", json::object()}, {"horizon", 1.0}};
    }
};

// ------------------------------------------------------------------ bridge

struct Patch {
    int depth;
    std::uint64_t k0;
    std::vector<double> w;  // W at indices k0 .. k0 + w.size() - 1
};

class BridgeImpl final : public PathImpl {
public:
    BridgeImpl(std::uint64_t seed, std::vector<double> drift, BridgeOptions opt, bool drifted)
        : seed_(seed), T_(opt.horizon), B_(opt.base_depth), R_(opt.resolution), rate_(std::move(drift)),
          drifted_(drifted) {
        if (!(T_ > 0)) throw DomainError("horizon must be positive");
        if (B_ < 0 || B_ > 24) throw DomainError("base depth must be in [0, 24]");
        if (R_ < B_ || R_ > 52) throw DomainError("resolution must be in [base depth, 52]");
        scale_.resize(static_cast<std::size_t>(R_) + 1);
        level_key_.resize(static_cast<std::size_t>(R_) + 1);
        step_.resize(static_cast<std::size_t>(R_) + 1);
        for (int m = 0; m <= R_; ++m) {
            scale_[static_cast<std::size_t>(m)] = std::sqrt(std::ldexp(T_, -m - 2));
            step_[static_cast<std::size_t>(m)] = std::ldexp(T_, -m);
            std::uint64_t h = mix64(seed_ ^ 0x5851f42d4c957f2dULL);
            level_key_[static_cast<std::size_t>(m)] = mix64(h ^ (static_cast<std::uint64_t>(m) * 0xd6e8feb86659fd93ULL));
        }
        integral_.assign(rate_.size() + 1, 0.0);
        rate_bound_ = 0.0;
        for (std::size_t k = 0; k < rate_.size(); ++k) {
            integral_[k + 1] = rate_[k] / static_cast<double>(k + 1);
            rate_bound_ += std::fabs(rate_[k]) * std::pow(T_, static_cast<double>(k));
        }
        if (rate_.empty()) drifted_ = drifted;
        base_.assign((std::size_t{1} << B_) + 1, 0.0);
        base_[0] = 0.0;
        base_[base_.size() - 1] = std::sqrt(T_) * node_normal(seed_, 0, kRootLevel);
        std::size_t stride = base_.size() - 1;
        for (int m = 0; m < B_; ++m) {
            std::size_t half = stride / 2;
            for (std::size_t i = 0; i + stride < base_.size(); i += stride) {
                base_[i + half] = mid(base_[i], base_[i + stride], i / stride, m);
            }
            stride = half;
        }
    }

    double horizon() const override { return T_; }
    std::string kind() const override { return drifted_ ? "drifted" : "bridge"; }
    bool analytic() const override { return false; }

    double mid(double a, double b, std::uint64_t k, int m) const {
        const auto i = static_cast<std::size_t>(m);
        return 0.5 * (a + b) + scale_[i] * normal_quantile(open_uniform(mix64(level_key_[i] ^ k)));
    }

    double drift(double t) const {
        if (!drifted_) return 0.0;
        double acc = 0.0;
        for (std::size_t k = integral_.size(); k-- > 0;) acc = acc * t + integral_[k];
        return acc;
    }

    // k 2^-m T; step_[m] = T 2^-m is exact, so this rounds like ldexp(k, -m) * T.
    double node_time(std::uint64_t k, int m) const { return static_cast<double>(k) * step_[static_cast<std::size_t>(m)]; }

    // W at both ends of cell k of depth d.
    std::pair<double, double> cell_w(int d, std::uint64_t k) const {
        if (d <= B_) {
            std::size_t step = std::size_t{1} << (B_ - d);
            return {base_[k * step], base_[(k + 1) * step]};
        }
        int m = B_;
        std::uint64_t kc = k >> (d - B_);
        double a = base_[kc], b = base_[kc + 1];
        if (has_patches_.load(std::memory_order_acquire)) {
            std::lock_guard<std::mutex> lock(mu_);
            for (const auto& p : patches_) {
                if (p.depth <= m || p.depth > d) continue;
                std::uint64_t kp = k >> (d - p.depth);
                if (kp < p.k0 || kp + 1 >= p.k0 + p.w.size()) continue;
                m = p.depth;
                kc = kp;
                a = p.w[kp - p.k0];
                b = p.w[kp + 1 - p.k0];
            }
        }
        for (; m < d; ++m) {
            double md = mid(a, b, kc, m);
            if ((k >> (d - m - 1)) & 1u) {
                a = md;
                kc = 2 * kc + 1;
            } else {
                b = md;
                kc = 2 * kc;
            }
        }
        return {a, b};
    }

    double node_w(std::uint64_t K) const {
        const std::uint64_t top = std::uint64_t{1} << R_;
        if (K == 0) return 0.0;
        if (K >= top) return base_.back();
        int z = __builtin_ctzll(K);
        return cell_w(R_ - z, K >> z).first;
    }

    double eval(double t) const override {
        const std::uint64_t top = std::uint64_t{1} << R_;
        double q = std::ldexp(t / T_, R_);
        if (q >= static_cast<double>(top)) return base_.back() + drift(T_);
        if (q <= 0) return 0.0;
        auto K = static_cast<std::uint64_t>(q);
        double frac = q - static_cast<double>(K);
        if (frac == 0.0) return node_w(K) + drift(node_time(K, R_));
        auto [a, b] = cell_w(R_, K);
        double xa = a + drift(node_time(K, R_));
        double xb = b + drift(node_time(K + 1, R_));
        return xa + (xb - xa) * frac;
    }

    void eval_many(const double* t, std::size_t n, double* out) const override {
        // Dyadic times on a common coarse grid read from a dense array.
        constexpr int kDense = 20;
        int need = 0;
        bool dyadic = n >= 64;
        for (std::size_t i = 0; dyadic && i < n; ++i) {
            double q = std::ldexp(t[i] / T_, kDense);
            if (q != std::floor(q)) {
                dyadic = false;
                break;
            }
            auto K = static_cast<std::uint64_t>(q);
            int lvl = K == 0 ? 0 : kDense - std::min(kDense, __builtin_ctzll(K));
            need = std::max(need, lvl);
        }
        if (dyadic && need <= R_ && static_cast<double>(n) * 8.0 >= std::ldexp(1.0, need)) {
            auto grid = dense_w(need);
            for (std::size_t i = 0; i < n; ++i) {
                auto k = static_cast<std::uint64_t>(std::ldexp(t[i] / T_, need));
                out[i] = (*grid)[k] + drift(node_time(k, need));
            }
            return;
        }
        for (std::size_t i = 0; i < n; ++i) out[i] = eval(t[i]);
    }

    std::shared_ptr<const std::vector<double>> dense_w(int n) const {
        {
            std::lock_guard<std::mutex> lock(mu_);
            auto it = dense_.find(n);
            if (it != dense_.end()) return it->second;
        }
        auto grid = std::make_shared<std::vector<double>>(build_w(n));
        std::lock_guard<std::mutex> lock(mu_);
        if (n <= 22) dense_.emplace(n, grid);
        return grid;
    }

    std::vector<double> build_w(int n) const {
        if (n <= B_) {
            std::size_t step = std::size_t{1} << (B_ - n);
            std::vector<double> out((std::size_t{1} << n) + 1);
            for (std::size_t k = 0; k < out.size(); ++k) out[k] = base_[k * step];
            return out;
        }
        std::vector<double> cur = base_;
        for (int m = B_; m < n; ++m) {
            std::vector<double> next(2 * (cur.size() - 1) + 1);
            for (std::size_t k = 0; k + 1 < cur.size(); ++k) {
                next[2 * k] = cur[k];
                next[2 * k + 1] = mid(cur[k], cur[k + 1], k, m);
            }
            next.back() = cur.back();
            cur.swap(next);
        }
        return cur;
    }

    std::vector<double> dyadic_values(int n) const override {
        if (n > R_) throw DomainError("dyadic depth beyond the path resolution");
        auto grid = dense_w(n);
        std::vector<double> out(*grid);
        if (drifted_)
            for (std::size_t k = 0; k < out.size(); ++k) out[k] += drift(node_time(k, n));
        return out;
    }

    std::vector<double> window_values(int n, std::uint64_t k0, std::uint64_t k1) const override {
        if (n > R_) throw DomainError("dyadic depth beyond the path resolution");
        std::vector<double> out;
        if (n <= B_) {
            std::size_t step = std::size_t{1} << (B_ - n);
            for (std::uint64_t k = k0; k <= k1; ++k) out.push_back(base_[k * step]);
        } else {
            // windowed midpoint doubling from the base grid
            auto lo_at = [&](int m) { return k0 >> (n - m); };
            auto hi_at = [&](int m) { return std::min<std::uint64_t>((k1 + (std::uint64_t{1} << (n - m)) - 1) >> (n - m), std::uint64_t{1} << m); };
            std::uint64_t lo = lo_at(B_);
            std::vector<double> cur(base_.begin() + static_cast<std::ptrdiff_t>(lo),
                                    base_.begin() + static_cast<std::ptrdiff_t>(hi_at(B_)) + 1);
            std::vector<double> next;
            for (int m = B_; m < n; ++m) {
                std::uint64_t nlo = lo_at(m + 1), nhi = hi_at(m + 1);
                next.assign(nhi - nlo + 1, 0.0);
                for (std::uint64_t j = nlo; j <= nhi; ++j) {
                    std::uint64_t p = j >> 1;
                    next[j - nlo] = (j & 1u) ? mid(cur[p - lo], cur[p + 1 - lo], p, m) : cur[p - lo];
                }
                cur.swap(next);
                lo = nlo;
            }
            out.swap(cur);
        }
        if (drifted_)
            for (std::uint64_t k = k0; k <= k1; ++k) out[k - k0] += drift(node_time(k, n));
        return out;
    }

    void refine_to(double s, double t, int depth) const override {
        if (depth > R_) throw DomainError("refinement depth beyond the path resolution");
        if (depth <= B_) return;
        std::uint64_t k0 = static_cast<std::uint64_t>(std::floor(std::ldexp(s / T_, depth)));
        std::uint64_t k1 = static_cast<std::uint64_t>(std::ceil(std::ldexp(t / T_, depth)));
        k1 = std::max(k1, k0 + 1);
        if (k1 - k0 > (std::uint64_t{1} << 24)) throw DomainError("refinement window too large");
        {
            std::lock_guard<std::mutex> lock(mu_);
            for (const auto& p : patches_)
                if (p.depth == depth && p.k0 <= k0 && k1 < p.k0 + p.w.size()) return;
        }
        int m = B_;
        std::uint64_t a = k0 >> (depth - m);
        std::uint64_t b = ((k1 - 1) >> (depth - m)) + 1;
        std::vector<double> cur(base_.begin() + static_cast<std::ptrdiff_t>(a),
                                base_.begin() + static_cast<std::ptrdiff_t>(b) + 1);
        for (; m < depth; ++m) {
            std::vector<double> next(2 * (cur.size() - 1) + 1);
            for (std::size_t i = 0; i + 1 < cur.size(); ++i) {
                next[2 * i] = cur[i];
                next[2 * i + 1] = mid(cur[i], cur[i + 1], a + i, m);
            }
            next.back() = cur.back();
            std::uint64_t na = k0 >> (depth - m - 1);
            std::uint64_t nb = ((k1 - 1) >> (depth - m - 1)) + 1;
            std::size_t off = static_cast<std::size_t>(na - 2 * a);
            cur.assign(next.begin() + static_cast<std::ptrdiff_t>(off),
                       next.begin() + static_cast<std::ptrdiff_t>(off + (nb - na) + 1));
            a = na;
        }
        std::lock_guard<std::mutex> lock(mu_);
        patches_.push_back(Patch{depth, a, std::move(cur)});
        has_patches_.store(true, std::memory_order_release);
    }

    // Range of the drift term over a cell.
    std::pair<double, double> drift_range(double t0, double t1) const {
        if (!drifted_) return {0.0, 0.0};
        double d0 = drift(t0), d1 = drift(t1);
        double slack = 0.5 * rate_bound_ * (t1 - t0);
        return {std::min(d0, d1) - slack, std::max(d0, d1) + slack};
    }

    bool reachable(double wa, double wb, double h, std::pair<double, double> dr, double y) const {
        double up = y - dr.first;    // W must reach at least this to have x >= y
        double dn = y - dr.second;   // W must reach at most this to have x <= y
        if (dn > std::max(wa, wb)) {
            double ya = dn - wa, yb = dn - wb;
            return 2.0 * ya * yb <= kTail * h;
        }
        if (up < std::min(wa, wb)) {
            double ya = wa - up, yb = wb - up;
            return 2.0 * ya * yb <= kTail * h;
        }
        return true;
    }

    bool segment_hit(std::uint64_t k, double t0, double t1, double xa, double xb, double lo, double hi,
                     double from, Hit& out) const {
        double s0 = t0, v0 = xa;
        if (from > t0) {
            s0 = from;
            double frac = std::ldexp(from / T_, R_) - static_cast<double>(k);
            v0 = xa + (xb - xa) * frac;
        }
        bool found = false;
        const double levels[2] = {lo, hi};
        for (int w = 0; w < (lo == hi ? 1 : 2); ++w) {
            double y = levels[w];
            if ((v0 - y) * (xb - y) > 0) continue;
            double tau;
            if (v0 == y || xb == xa) tau = s0;
            else if (xb == y) tau = t1;
            else tau = std::clamp(t0 + (y - xa) / (xb - xa) * (t1 - t0), s0, t1);
            if (!found || tau < out.time) {
                out = Hit{tau, w};
                found = true;
            }
        }
        return found;
    }

    bool search(int m, std::uint64_t k, double wa, double wb, double lo, double hi, double from, Hit& out) const {
        const double t0 = node_time(k, m), t1 = node_time(k + 1, m);
        if (t1 < from) return false;
        if (m == R_) return segment_hit(k, t0, t1, wa + drift(t0), wb + drift(t1), lo, hi, from, out);
        auto dr = drift_range(t0, t1);
        const double h = t1 - t0;
        if (!reachable(wa, wb, h, dr, lo) && (lo == hi || !reachable(wa, wb, h, dr, hi))) return false;
        double md = mid(wa, wb, k, m);
        return search(m + 1, 2 * k, wa, md, lo, hi, from, out) || search(m + 1, 2 * k + 1, md, wb, lo, hi, from, out);
    }

    std::optional<Hit> first_hit_any(double lo, double hi, double from) const override {
        const std::uint64_t nb = std::uint64_t{1} << B_;
        double qb = std::ldexp(from / T_, B_);
        std::uint64_t kb = std::min<std::uint64_t>(static_cast<std::uint64_t>(qb), nb - 1);
        Hit h;
        for (; kb < nb; ++kb)
            if (search(B_, kb, base_[kb], base_[kb + 1], lo, hi, from, h)) return h;
        return std::nullopt;
    }

    // Largest value of sign*x over [s,t].
    void extreme_search(int m, std::uint64_t k, double wa, double wb, double s, double t, double sign,
                        double& best) const {
        const double t0 = node_time(k, m), t1 = node_time(k + 1, m);
        if (t1 <= s || t0 >= t) return;
        if (m == R_) {
            if (t0 >= s) best = std::max(best, sign * (wa + drift(t0)));
            if (t1 <= t) best = std::max(best, sign * (wb + drift(t1)));
            return;
        }
        const double h = t1 - t0;
        const double delta = std::fabs(wa - wb);
        const double c = 0.5 * (std::sqrt(delta * delta + 2.0 * kTailExtremes * h) - delta);
        auto dr = drift_range(t0, t1);
        double bound = sign > 0 ? std::max(wa, wb) + c + dr.second : -(std::min(wa, wb) - c + dr.first);
        if (bound <= best) return;
        double md = mid(wa, wb, k, m);
        if (sign * wa >= sign * wb) {
            extreme_search(m + 1, 2 * k, wa, md, s, t, sign, best);
            extreme_search(m + 1, 2 * k + 1, md, wb, s, t, sign, best);
        } else {
            extreme_search(m + 1, 2 * k + 1, md, wb, s, t, sign, best);
            extreme_search(m + 1, 2 * k, wa, md, s, t, sign, best);
        }
    }

    Extremes extremes(double s, double t) const override {
        double a = eval(s), b = eval(t);
        double hi = std::max(a, b), lo_neg = -std::min(a, b);
        if (t > s) {
            const std::uint64_t nb = std::uint64_t{1} << B_;
            std::uint64_t k0 = std::min<std::uint64_t>(static_cast<std::uint64_t>(std::ldexp(s / T_, B_)), nb - 1);
            for (std::uint64_t k = k0; k < nb; ++k) {
                if (node_time(k, B_) >= t) break;
                extreme_search(B_, k, base_[k], base_[k + 1], s, t, 1.0, hi);
                extreme_search(B_, k, base_[k], base_[k + 1], s, t, -1.0, lo_neg);
            }
        }
        return {-lo_neg, hi};
    }

    json spec() const override {
        json j = {{"kind", kind()},       {"seed", seed_},       {"horizon", T_},
                  {"base_depth", B_},     {"resolution", R_}};
        if (drifted_) j["drift"] = rate_;
        return j;
    }

private:
    std::uint64_t seed_;
    double T_;
    int B_, R_;
    std::vector<double> rate_;
    std::vector<double> integral_;
    double rate_bound_ = 0.0;
    bool drifted_;
    std::vector<double> scale_;
    std::vector<std::uint64_t> level_key_;  // node_key prefix per level
    std::vector<double> step_;
    std::vector<double> base_;
    mutable std::mutex mu_;
    mutable std::atomic<bool> has_patches_{false};
    mutable std::vector<Patch> patches_;
    mutable std::map<int, std::shared_ptr<const std::vector<double>>> dense_;
};

// ------------------------------------------------------------- composites

class TimeChangedImpl final : public PathImpl {
public:
    TimeChangedImpl(Path inner, TimeMap tau) : inner_(std::move(inner)), tau_(std::move(tau)) {
        if (tau_.horizon != inner_.horizon()) throw DomainError("time map horizon differs from the path horizon");
    }
    double horizon() const override { return inner_.horizon(); }
    std::string kind() const override { return "time_changed"; }
    bool analytic() const override { return inner_.analytic(); }
    double eval(double t) const override { return inner_.impl().eval(tau_(t)); }
    Extremes extremes(double s, double t) const override { return inner_.impl().extremes(tau_(s), tau_(t)); }
    std::optional<std::vector<double>> turning_points(double s, double t) const override {
        auto in = inner_.impl().turning_points(tau_(s), tau_(t));
        if (!in) return std::nullopt;
        for (double& v : *in) v = tau_.inverse(v);
        return in;
    }
    std::optional<Hit> first_hit_any(double lo, double hi, double from) const override {
        auto h = inner_.impl().first_hit_any(lo, hi, tau_(from));
        if (!h) return std::nullopt;
        return Hit{std::max(from, tau_.inverse(h->time)), h->which};
    }
    json spec() const override { return {{"kind", "time_changed"}, {"inner", inner_.to_json()}, {"tau", tau_.to_json()}}; }

private:
    Path inner_;
    TimeMap tau_;
};

class MappedImpl final : public PathImpl {
public:
    MappedImpl(Path inner, ValueMap phi) : inner_(std::move(inner)), phi_(phi) {}
    double horizon() const override { return inner_.horizon(); }
    std::string kind() const override { return "mapped"; }
    bool analytic() const override { return inner_.analytic(); }
    double eval(double t) const override { return phi_(inner_.impl().eval(t)); }
    Extremes extremes(double s, double t) const override {
        auto e = inner_.impl().extremes(s, t);
        double a = phi_(e.min), b = phi_(e.max);
        return {std::min(a, b), std::max(a, b)};
    }
    std::optional<std::vector<double>> turning_points(double s, double t) const override {
        return inner_.impl().turning_points(s, t);
    }
    std::optional<Hit> first_hit_any(double lo, double hi, double from) const override {
        double a = phi_.inverse(lo), b = phi_.inverse(hi);
        std::optional<Hit> best;
        const double pre[2] = {a, b};
        for (int w = 0; w < (lo == hi ? 1 : 2); ++w) {
            if (std::isnan(pre[w])) continue;
            auto h = inner_.impl().first_hit_any(pre[w], pre[w], from);
            if (h && (!best || h->time < best->time)) best = Hit{h->time, w};
        }
        return best;
    }
    json spec() const override { return {{"kind", "mapped"}, {"inner", inner_.to_json()}, {"phi", phi_.to_json()}}; }

private:
    Path inner_;
    ValueMap phi_;
};

}  // namespace

// ------------------------------------------------------------- factories

Path zigzag() {
    return Path(std::make_shared<PiecewiseLinear>(std::vector<double>{0.0, 0.5, 1.0}, std::vector<double>{0.0, 1.0, 0.0},
                                                  "zigzag", json::object()));
}

Path constant(double c, double horizon) {
    return Path(std::make_shared<PiecewiseLinear>(std::vector<double>{0.0, horizon}, std::vector<double>{c, c},
                                                  "constant", json{{"value", c}}));
}

Path linear(double slope, double intercept, double horizon) {
    return Path(std::make_shared<PiecewiseLinear>(std::vector<double>{0.0, horizon},
                                                  std::vector<double>{intercept, intercept + slope * horizon}, "linear",
                                                  json{{"slope", slope}, {"intercept", intercept}}));
}

Path piecewise_linear(std::vector<double> t, std::vector<double> x) {
    json params = {{"t", t}, {"x", x}};
    return Path(std::make_shared<PiecewiseLinear>(std::move(t), std::move(x), "piecewise_linear", params));
}

Path cantor_path() { return Path(std::make_shared<CantorImpl>()); }

Path bridge(std::uint64_t seed, BridgeOptions opt) { return Path(std::make_shared<BridgeImpl>(seed, std::vector<double>{}, opt, false)); }

Path drifted(std::uint64_t seed, std::vector<double> drift_rate, BridgeOptions opt) {
    return Path(std::make_shared<BridgeImpl>(seed, std::move(drift_rate), opt, true));
}

Path time_changed(const Path& inner, const TimeMap& tau) { return Path(std::make_shared<TimeChangedImpl>(inner, tau)); }

Path mapped(const Path& inner, const ValueMap& phi) { return Path(std::make_shared<MappedImpl>(inner, phi)); }

double cantor_distance(double t) {
    if (t <= 0.0) return -t;
    if (t >= 1.0) return t - 1.0;
    double scale = 1.0;
    for (int i = 0; i < 60; ++i) {
        if (t <= 1.0 / 3.0) {
            t *= 3.0;
        } else if (t >= 2.0 / 3.0) {
            t = 3.0 * t - 2.0;
        } else {
            return scale * std::min(t - 1.0 / 3.0, 2.0 / 3.0 - t);
        }
        scale /= 3.0;
    }
    return 0.0;
}

double cantor_function_value(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    double v = 0.0, w = 0.5;
    for (int i = 0; i < 60; ++i) {
        if (t <= 1.0 / 3.0) {
            t *= 3.0;
        } else if (t >= 2.0 / 3.0) {
            v += w;
            t = 3.0 * t - 2.0;
        } else {
            return v + w;
        }
        w *= 0.5;
    }
    return v;
}

Path Path::from_json(const json& j) {
    const std::string kind = j.at("kind");
    if (kind == "analytic") {
        const std::string f = j.at("formula");
        const json p = j.value("parameters", json::object());
        const double T = j.value("horizon", 1.0);
        if (f == "zigzag") return zigzag();
        if (f == "constant") return constant(p.value("value", 0.0), T);
        if (f == "linear") return linear(p.value("slope", 1.0), p.value("intercept", 0.0), T);
        if (f == "piecewise_linear")
            return piecewise_linear(p.at("t").get<std::vector<double>>(), p.at("x").get<std::vector<double>>());
        if (f == "cantor") return cantor_path();
        throw DomainError("unknown formula: " + f);
    }
    if (kind == "bridge" || kind == "drifted") {
        BridgeOptions opt;
        opt.horizon = j.value("horizon", 1.0);
        opt.base_depth = j.value("base_depth", 12);
        opt.resolution = j.value("resolution", 40);
        auto seed = j.at("seed").get<std::uint64_t>();
        if (kind == "bridge") return bridge(seed, opt);
        return drifted(seed, j.value("drift", std::vector<double>{}), opt);
    }
    if (kind == "time_changed") return time_changed(from_json(j.at("inner")), TimeMap::from_json(j.at("tau")));
    if (kind == "mapped") return mapped(from_json(j.at("inner")), ValueMap::from_json(j.at("phi")));
    throw DomainError("unknown path kind: " + kind);
}

Path parse_path(const std::string& text) {
    auto parts = split(text, ':');
    if (parts.empty()) throw DomainError("empty path spec");
    const std::string& head = parts[0];
    try {
        if (head == "zigzag") return zigzag();
        if (head == "cantor") return cantor_path();
        if (head == "constant") return constant(parts.size() > 1 ? std::stod(parts[1]) : 0.0);
        if (head == "linear") {
            auto v = parts.size() > 1 ? parse_doubles(parts[1]) : std::vector<double>{};
            return linear(v.size() > 0 ? v[0] : 1.0, v.size() > 1 ? v[1] : 0.0);
        }
        if (head == "bridge") {
            if (parts.size() < 2) throw DomainError("bridge spec needs a seed");
            BridgeOptions opt;
            if (parts.size() > 2) opt.resolution = std::stoi(parts[2]);
            return bridge(std::stoull(parts[1]), opt);
        }
        if (head == "drifted") {
            if (parts.size() < 3) throw DomainError("drifted spec needs a seed and drift coefficients");
            return drifted(std::stoull(parts[1]), parse_doubles(parts[2]));
        }
        if (head == "pl") {
            if (parts.size() < 2) throw DomainError("pl spec needs knots");
            std::vector<double> t, x;
            for (const auto& knot : split(parts[1], ';')) {
                if (knot.empty()) continue;
                auto v = parse_doubles(knot);
                if (v.size() != 2) throw DomainError("pl knot must be t,x");
                t.push_back(v[0]);
                x.push_back(v[1]);
            }
            return piecewise_linear(t, x);
        }
    } catch (const std::invalid_argument&) {
        throw DomainError("malformed path spec: " + text);
    } catch (const std::out_of_range&) {
        throw DomainError("malformed path spec: " + text);
    }
    throw DomainError("unknown path spec: " + text);
}

}  // namespace pathlt
