#include "pathlt/functions.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>

namespace pathlt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double horner(const std::vector<double>& c, double z) {
    double acc = 0.0;
    for (std::size_t k = c.size(); k-- > 0;) acc = acc * z + c[k];
    return acc;
}

// sum_k c[k] z^(k+shift) / (k+shift)
double antiderivative(const std::vector<double>& c, double z, int shift) {
    double acc = 0.0;
    for (std::size_t k = c.size(); k-- > 0;) acc = acc * z + c[k] / static_cast<double>(k + static_cast<std::size_t>(shift));
    return acc * std::pow(z, shift);
}

void trim(std::vector<double>& c) {
    while (!c.empty() && c.back() == 0.0) c.pop_back();
}

// Coefficients of P(s (x - base)) in powers of (x - base).
std::vector<double> dilate(const std::vector<double>& p, double s) {
    std::vector<double> out(p.size());
    double f = 1.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
        out[k] = p[k] * f;
        f *= s;
    }
    return out;
}

std::vector<double> taylor_shift(std::vector<double> c, double d) {
    // p(z' + d) in powers of z'
    const std::size_t n = c.size();
    if (d == 0.0 || n < 2) return c;
    for (std::size_t i = 0; i + 1 < n; ++i)
        for (std::size_t j = n - 1; j-- > i;) c[j] += d * c[j + 1];
    return c;
}

json bound_to_json(double v) { return std::isinf(v) ? json(nullptr) : json(v); }
double bound_from_json(const json& j, double inf_value) { return j.is_null() ? inf_value : j.get<double>(); }

}  // namespace

// -------------------------------------------------------------- PolyPiece

double PolyPiece::operator()(double u) const { return horner(c, u - origin); }

std::pair<double, double> PolyPiece::moments(double a, double b) const {
    if (c.empty() || !(b > a)) return {0.0, 0.0};
    const double za = a - origin, zb = b - origin;
    return {antiderivative(c, zb, 1) - antiderivative(c, za, 1), antiderivative(c, zb, 2) - antiderivative(c, za, 2)};
}

PolyPiece PolyPiece::shifted(double new_origin) const {
    PolyPiece p = *this;
    p.c = taylor_shift(c, new_origin - origin);
    p.origin = new_origin;
    return p;
}

// ---------------------------------------------------------- PiecewisePoly

PiecewisePoly PiecewisePoly::constant(double lo, double hi, double value) {
    PiecewisePoly p;
    if (value != 0.0 && hi > lo) {
        double o = std::isfinite(lo) ? lo : (std::isfinite(hi) ? hi : 0.0);
        p.pieces.push_back(PolyPiece{lo, hi, o, {value}});
    }
    return p;
}

PiecewisePoly PiecewisePoly::polynomial(std::vector<double> coeffs) {
    trim(coeffs);
    PiecewisePoly p;
    if (!coeffs.empty()) p.pieces.push_back(PolyPiece{-kInf, kInf, 0.0, std::move(coeffs)});
    return p;
}

PiecewisePoly PiecewisePoly::sum(const std::vector<PiecewisePoly>& parts) {
    std::vector<double> cuts;
    std::vector<const PolyPiece*> all;
    for (const auto& part : parts)
        for (const auto& pc : part.pieces) {
            cuts.push_back(pc.lo);
            cuts.push_back(pc.hi);
            all.push_back(&pc);
        }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    PiecewisePoly out;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double a = cuts[i], b = cuts[i + 1];
        const double o = std::isfinite(a) ? a : (std::isfinite(b) ? b : 0.0);
        std::vector<double> acc;
        for (const PolyPiece* pc : all) {
            if (pc->lo > a || pc->hi < b) continue;
            auto s = pc->shifted(o);
            if (s.c.size() > acc.size()) acc.resize(s.c.size(), 0.0);
            for (std::size_t k = 0; k < s.c.size(); ++k) acc[k] += s.c[k];
        }
        trim(acc);
        if (acc.empty()) continue;
        if (!out.pieces.empty()) {
            auto& last = out.pieces.back();
            if (last.hi == a && last.shifted(o).c == acc) {
                last.hi = b;
                continue;
            }
        }
        out.pieces.push_back(PolyPiece{a, b, o, std::move(acc)});
    }
    return out;
}

double PiecewisePoly::operator()(double u) const {
    auto it = std::upper_bound(pieces.begin(), pieces.end(), u, [](double v, const PolyPiece& p) { return v < p.lo; });
    if (it == pieces.begin()) return 0.0;
    --it;
    return u < it->hi ? (*it)(u) : 0.0;
}

double PiecewisePoly::integral(double a, double b) const {
    double s = 0.0;
    for (const auto& p : pieces) {
        double lo = std::max(a, p.lo), hi = std::min(b, p.hi);
        if (hi > lo) s += p.moments(lo, hi).first;
    }
    return s;
}

double PiecewisePoly::integrate_linear(double a, double b, double alpha, double beta, double anchor) const {
    double s = 0.0;
    for (const auto& p : pieces) {
        double lo = std::max(a, p.lo), hi = std::min(b, p.hi);
        if (!(hi > lo)) continue;
        auto [m0, m1] = p.moments(lo, hi);
        s += alpha * m0 + beta * (m1 + (p.origin - anchor) * m0);
    }
    return s;
}

int PiecewisePoly::degree() const {
    int d = -1;
    for (const auto& p : pieces) d = std::max(d, static_cast<int>(p.c.size()) - 1);
    return d;
}

PiecewisePoly PiecewisePoly::scaled(double s) const {
    PiecewisePoly out;
    if (s == 0.0) return out;
    out = *this;
    for (auto& p : out.pieces)
        for (double& v : p.c) v *= s;
    return out;
}

json PiecewisePoly::to_json() const {
    json j = json::array();
    for (const auto& p : pieces)
        j.push_back({{"lo", bound_to_json(p.lo)}, {"hi", bound_to_json(p.hi)}, {"origin", p.origin}, {"c", p.c}});
    return j;
}

PiecewisePoly PiecewisePoly::from_json(const json& j) {
    PiecewisePoly p;
    for (const auto& e : j) {
        PolyPiece pc;
        pc.lo = bound_from_json(e.at("lo"), -kInf);
        pc.hi = bound_from_json(e.at("hi"), kInf);
        pc.origin = e.value("origin", std::isfinite(pc.lo) ? pc.lo : 0.0);
        pc.c = e.at("c").get<std::vector<double>>();
        if (!(pc.hi > pc.lo)) throw DomainError("density piece with empty range");
        p.pieces.push_back(std::move(pc));
    }
    std::sort(p.pieces.begin(), p.pieces.end(), [](const PolyPiece& a, const PolyPiece& b) { return a.lo < b.lo; });
    for (std::size_t i = 1; i < p.pieces.size(); ++i)
        if (p.pieces[i].lo < p.pieces[i - 1].hi) throw DomainError("density pieces overlap");
    return p;
}

// ------------------------------------------------------- CurvatureMeasure

double CurvatureMeasure::mass(double a, double b) const {
    if (!(b > a)) return 0.0;
    double s = 0.0;
    auto it = std::lower_bound(atoms.begin(), atoms.end(), a, [](const Atom& x, double v) { return x.at < v; });
    for (; it != atoms.end() && it->at < b; ++it) s += it->weight;
    return s + density.integral(a, b);
}

void CurvatureMeasure::normalize() {
    std::sort(atoms.begin(), atoms.end(), [](const Atom& x, const Atom& y) { return x.at < y.at; });
    std::vector<Atom> merged;
    for (const auto& a : atoms) {
        if (!merged.empty() && merged.back().at == a.at) merged.back().weight += a.weight;
        else merged.push_back(a);
    }
    merged.erase(std::remove_if(merged.begin(), merged.end(), [](const Atom& a) { return a.weight == 0.0; }), merged.end());
    atoms = std::move(merged);
}

CurvatureMeasure CurvatureMeasure::operator+(const CurvatureMeasure& o) const {
    CurvatureMeasure m;
    m.atoms = atoms;
    m.atoms.insert(m.atoms.end(), o.atoms.begin(), o.atoms.end());
    m.normalize();
    m.density = PiecewisePoly::sum({density, o.density});
    return m;
}

CurvatureMeasure CurvatureMeasure::scaled(double s) const {
    CurvatureMeasure m;
    if (s == 0.0) return m;
    m.atoms = atoms;
    for (auto& a : m.atoms) a.weight *= s;
    m.density = density.scaled(s);
    return m;
}

json CurvatureMeasure::to_json() const {
    json a = json::array();
    for (const auto& x : atoms) a.push_back({x.at, x.weight});
    return {{"atoms", a}, {"density", density.to_json()}};
}

CurvatureMeasure CurvatureMeasure::from_json(const json& j) {
    CurvatureMeasure m;
    for (const auto& a : j.value("atoms", json::array())) m.atoms.push_back({a.at(0).get<double>(), a.at(1).get<double>()});
    m.normalize();
    if (j.contains("density")) m.density = PiecewisePoly::from_json(j.at("density"));
    return m;
}

// ----------------------------------------------------------- TestFunction

double TestFunction::operator()(double u) const {
    const double x0 = anchor;
    double v = value_at_anchor + slope_at_anchor * (u - x0);
    const auto& at = curvature.atoms;
    if (u >= x0) {
        auto it = std::lower_bound(at.begin(), at.end(), x0, [](const Atom& a, double y) { return a.at < y; });
        for (; it != at.end() && it->at < u; ++it) v += it->weight * (u - it->at);
        v += curvature.density.integrate_linear(x0, u, 0.0, -1.0, u);
    } else {
        auto it = std::lower_bound(at.begin(), at.end(), u, [](const Atom& a, double y) { return a.at < y; });
        for (; it != at.end() && it->at < x0; ++it) v += it->weight * (it->at - u);
        v += curvature.density.integrate_linear(u, x0, 0.0, 1.0, u);
    }
    return v;
}

double TestFunction::left_derivative(double u) const {
    if (u >= anchor) return slope_at_anchor + curvature.mass(anchor, u);
    return slope_at_anchor - curvature.mass(u, anchor);
}

double TestFunction::second_derivative(double u) const { return curvature.density(u); }

TestFunction TestFunction::operator+(const TestFunction& o) const {
    TestFunction r;
    r.anchor = anchor;
    r.value_at_anchor = value_at_anchor + o(anchor);
    r.slope_at_anchor = slope_at_anchor + o.left_derivative(anchor);
    r.curvature = curvature + o.curvature;
    return r;
}

TestFunction TestFunction::scaled(double s) const {
    TestFunction r;
    r.anchor = anchor;
    r.value_at_anchor = s * value_at_anchor;
    r.slope_at_anchor = s * slope_at_anchor;
    r.curvature = curvature.scaled(s);
    return r;
}

std::vector<double> TestFunction::breakpoints() const {
    std::vector<double> b;
    for (const auto& a : curvature.atoms) b.push_back(a.at);
    for (const auto& p : curvature.density.pieces) {
        if (std::isfinite(p.lo)) b.push_back(p.lo);
        if (std::isfinite(p.hi)) b.push_back(p.hi);
    }
    std::sort(b.begin(), b.end());
    b.erase(std::unique(b.begin(), b.end()), b.end());
    return b;
}

json TestFunction::to_json() const {
    return {{"anchor", anchor}, {"value", value_at_anchor}, {"slope", slope_at_anchor}, {"curvature", curvature.to_json()}};
}

TestFunction TestFunction::from_json(const json& j) {
    TestFunction f;
    f.anchor = j.value("anchor", 0.0);
    f.value_at_anchor = j.value("value", 0.0);
    f.slope_at_anchor = j.value("slope", 0.0);
    if (j.contains("curvature")) f.curvature = CurvatureMeasure::from_json(j.at("curvature"));
    return f;
}

// ---------------------------------------------------------------- parsing

namespace {

struct Term {
    double coeff = 1.0;
    std::string name;             // "1", "u", "pow", "abs", "pos", "neg", "tent", "ind_ge", "ind_lt", "box"
    std::vector<double> args;     // shift a, exponent, or tent/box points
};

std::string strip(const std::string& s) {
    std::string out;
    for (char ch : s)
        if (!std::isspace(static_cast<unsigned char>(ch))) out.push_back(ch);
    return out;
}

double to_number(const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw DomainError("expected a number, got '" + s + "'");
    }
    if (used != s.size()) throw DomainError("expected a number, got '" + s + "'");
    return v;
}

// "u", "u-0.5", "u+2" -> shift a such that the argument is u - a
double parse_shift(const std::string& s) {
    if (s.empty() || s[0] != 'u') throw DomainError("expected an argument of the form u-a: " + s);
    if (s.size() == 1) return 0.0;
    return -to_number(s.substr(1));
}

std::vector<std::string> split_args(const std::string& s) {
    std::vector<std::string> out(1);
    for (char ch : s) {
        if (ch == ',') out.emplace_back();
        else out.back().push_back(ch);
    }
    return out;
}

Term parse_atom(const std::string& s) {
    Term t;
    if (s == "u") {
        t.name = "u";
        return t;
    }
    if (s.rfind("u^", 0) == 0) {
        t.name = "pow";
        t.args = {to_number(s.substr(2))};
        if (t.args[0] < 0 || t.args[0] != std::floor(t.args[0]) || t.args[0] > 9)
            throw DomainError("powers must be integers in [0, 9]");
        return t;
    }
    auto open = s.find('(');
    if (open != std::string::npos && s.back() == ')') {
        std::string head = s.substr(0, open);
        std::string inner = s.substr(open + 1, s.size() - open - 2);
        if (head == "abs" || head == "pos" || head == "neg") {
            t.name = head;
            t.args = {parse_shift(inner)};
            return t;
        }
        if (head == "tent" || head == "box") {
            auto parts = split_args(inner);
            for (const auto& p : parts) t.args.push_back(to_number(p));
            if (head == "tent" && (t.args.size() != 3 || !(t.args[0] < t.args[1] && t.args[1] < t.args[2])))
                throw DomainError("tent(a,b,c) needs a < b < c");
            if (head == "box" && (t.args.size() != 2 || !(t.args[0] < t.args[1])))
                throw DomainError("box(a,b) needs a < b");
            t.name = head;
            return t;
        }
        if (head == "ind") {
            auto ge = inner.find(">=");
            auto lt = inner.find('<');
            if (inner.rfind("u>=", 0) == 0 && ge != std::string::npos) {
                t.name = "ind_ge";
                t.args = {to_number(inner.substr(3))};
                return t;
            }
            if (inner.rfind("u<", 0) == 0 && lt != std::string::npos) {
                t.name = "ind_lt";
                t.args = {to_number(inner.substr(2))};
                return t;
            }
            throw DomainError("ind() takes u>=a or u<a");
        }
        throw DomainError("unknown function: " + head);
    }
    t.name = "1";
    t.coeff = to_number(s);
    return t;
}

std::vector<Term> parse_terms(const std::string& text) {
    const std::string s = strip(text);
    if (s.empty()) throw DomainError("empty function spec");
    std::vector<std::string> raw;
    std::string cur;
    int depth = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        char ch = s[i];
        if (ch == '(') ++depth;
        if (ch == ')') --depth;
        bool sign = (ch == '+' || ch == '-') && depth == 0 && i > 0;
        if (sign) {
            char prev = s[i - 1];
            bool exponent = (prev == 'e' || prev == 'E') && i >= 2 && std::isdigit(static_cast<unsigned char>(s[i - 2]));
            if (prev == '*' || prev == '^' || exponent) sign = false;
        }
        if (sign) {
            raw.push_back(cur);
            cur.clear();
        }
        cur.push_back(ch);
    }
    raw.push_back(cur);
    if (depth != 0) throw DomainError("unbalanced parentheses in: " + text);

    std::vector<Term> terms;
    for (std::string r : raw) {
        double sign = 1.0;
        if (!r.empty() && (r[0] == '+' || r[0] == '-')) {
            if (r[0] == '-') sign = -1.0;
            r = r.substr(1);
        }
        if (r.empty()) throw DomainError("dangling sign in: " + text);
        double coeff = 1.0;
        std::size_t star = std::string::npos;
        int d = 0;
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (r[i] == '(') ++d;
            if (r[i] == ')') --d;
            if (r[i] == '*' && d == 0) {
                star = i;
                break;
            }
        }
        if (star != std::string::npos) {
            coeff = to_number(r.substr(0, star));
            r = r.substr(star + 1);
        }
        Term t = parse_atom(r);
        t.coeff *= sign * coeff;
        terms.push_back(t);
    }
    return terms;
}

TestFunction term_function(const Term& t) {
    TestFunction f;  // anchored at 0
    const double a = t.args.empty() ? 0.0 : t.args[0];
    if (t.name == "1") {
        f.value_at_anchor = 1.0;
    } else if (t.name == "u") {
        f.slope_at_anchor = 1.0;
    } else if (t.name == "pow") {
        int k = static_cast<int>(a);
        if (k == 0) f.value_at_anchor = 1.0;
        if (k == 1) f.slope_at_anchor = 1.0;
        if (k >= 2) {
            std::vector<double> c(static_cast<std::size_t>(k - 1), 0.0);
            c[static_cast<std::size_t>(k - 2)] = static_cast<double>(k * (k - 1));
            f.curvature.density = PiecewisePoly::polynomial(c);
        }
    } else if (t.name == "abs") {
        f.value_at_anchor = std::fabs(a);
        f.slope_at_anchor = a >= 0 ? -1.0 : 1.0;
        f.curvature.atoms = {{a, 2.0}};
    } else if (t.name == "pos") {
        f.value_at_anchor = std::max(-a, 0.0);
        f.slope_at_anchor = a < 0 ? 1.0 : 0.0;
        f.curvature.atoms = {{a, 1.0}};
    } else if (t.name == "neg") {
        f.value_at_anchor = std::max(a, 0.0);
        f.slope_at_anchor = a >= 0 ? -1.0 : 0.0;
        f.curvature.atoms = {{a, 1.0}};
    } else if (t.name == "tent") {
        const double l = t.args[0], m = t.args[1], r = t.args[2];
        const double up = 1.0 / (m - l), down = 1.0 / (r - m);
        if (0.0 > l && 0.0 <= m) f.value_at_anchor = (0.0 - l) * up;
        else if (0.0 > m && 0.0 < r) f.value_at_anchor = (r - 0.0) * down;
        if (0.0 > l && 0.0 <= m) f.slope_at_anchor = up;
        else if (0.0 > m && 0.0 <= r) f.slope_at_anchor = -down;
        f.curvature.atoms = {{l, up}, {m, -(up + down)}, {r, down}};
    } else {
        throw DomainError("'" + t.name + "' is not allowed in a test function");
    }
    return f.scaled(t.coeff);
}

PiecewisePoly term_weight(const Term& t) {
    const double a = t.args.empty() ? 0.0 : t.args[0];
    PiecewisePoly p;
    if (t.name == "1") {
        p = PiecewisePoly::polynomial({1.0});
    } else if (t.name == "u") {
        p = PiecewisePoly::polynomial({0.0, 1.0});
    } else if (t.name == "pow") {
        std::vector<double> c(static_cast<std::size_t>(a) + 1, 0.0);
        c.back() = 1.0;
        p = PiecewisePoly::polynomial(c);
    } else if (t.name == "abs" || t.name == "pos" || t.name == "neg") {
        double left = t.name == "pos" ? 0.0 : -1.0;
        double right = t.name == "neg" ? 0.0 : 1.0;
        if (left != 0.0) p.pieces.push_back(PolyPiece{-kInf, a, a, {0.0, left}});
        if (right != 0.0) p.pieces.push_back(PolyPiece{a, kInf, a, {0.0, right}});
    } else if (t.name == "tent") {
        const double l = t.args[0], m = t.args[1], r = t.args[2];
        p.pieces.push_back(PolyPiece{l, m, l, {0.0, 1.0 / (m - l)}});
        p.pieces.push_back(PolyPiece{m, r, m, {1.0, -1.0 / (r - m)}});
    } else if (t.name == "ind_ge") {
        p = PiecewisePoly::constant(a, kInf, 1.0);
    } else if (t.name == "ind_lt") {
        p = PiecewisePoly::constant(-kInf, a, 1.0);
    } else if (t.name == "box") {
        p = PiecewisePoly::constant(t.args[0], t.args[1], 1.0);
    }
    return p.scaled(t.coeff);
}

}  // namespace

TestFunction parse_function(const std::string& text) {
    TestFunction f;
    for (const auto& t : parse_terms(text)) f = f + term_function(t);
    return f;
}

PiecewisePoly parse_weight(const std::string& text) {
    std::vector<PiecewisePoly> parts;
    for (const auto& t : parse_terms(text)) parts.push_back(term_weight(t));
    return PiecewisePoly::sum(parts);
}

// -------------------------------------------------------------- Mollifier

Mollifier Mollifier::standard() { return from_coeffs({0.0, 0.0, 0.0, 140.0, -420.0, 420.0, -140.0}); }

Mollifier Mollifier::from_coeffs(std::vector<double> g) {
    Mollifier m;
    m.g = std::move(g);
    m.cdf.assign(m.g.size() + 1, 0.0);
    for (std::size_t k = 0; k < m.g.size(); ++k) m.cdf[k + 1] = m.g[k] / static_cast<double>(k + 1);
    if (std::fabs(m.mass() - 1.0) > 1e-12) throw DomainError("mollifier must have unit mass");
    return m;
}

double Mollifier::operator()(double z) const { return (z < 0.0 || z > 1.0) ? 0.0 : horner(g, z); }

double Mollifier::mass() const { return horner(cdf, 1.0); }

TestFunction mollify(const TestFunction& f, int n, const Mollifier& g) {
    if (n < 1) throw DomainError("mollifier scale must be >= 1");
    const double nn = static_cast<double>(n);
    const double delta = 1.0 / nn;
    const auto gn = dilate(g.g, nn);   // g(n z) in powers of z
    const auto Gn = dilate(g.cdf, nn); // G(n z)

    std::vector<PiecewisePoly> parts;
    for (const auto& a : f.curvature.atoms) {
        PiecewisePoly p;
        std::vector<double> c = gn;
        for (double& v : c) v *= a.weight * nn;
        p.pieces.push_back(PolyPiece{a.at, a.at + delta, a.at, c});
        parts.push_back(p);
    }
    for (const auto& pc : f.curvature.density.pieces) {
        PiecewisePoly p;
        const double lo = pc.lo, hi = pc.hi;
        if (std::isinf(lo) && std::isinf(hi)) {
            // polynomial on the line: sum_j (-1)^j m_j p^(j) / j!
            std::vector<double> out(pc.c.size(), 0.0);
            std::vector<double> deriv = pc.c;
            double fact = 1.0;
            for (std::size_t j = 0; j < pc.c.size(); ++j) {
                if (j > 0) {
                    fact *= static_cast<double>(j);
                    for (std::size_t k = 0; k + 1 < deriv.size(); ++k) deriv[k] = deriv[k + 1] * static_cast<double>(k + 1);
                    deriv.pop_back();
                }
                std::vector<double> zj(g.g.size() + j, 0.0);
                for (std::size_t k = 0; k < g.g.size(); ++k) zj[k + j] = g.g[k];
                double mj = antiderivative(zj, 1.0, 1) * std::pow(delta, static_cast<double>(j));
                double sgn = (j % 2 == 0) ? 1.0 : -1.0;
                for (std::size_t k = 0; k < deriv.size(); ++k) out[k] += sgn * mj / fact * deriv[k];
            }
            trim(out);
            if (!out.empty()) p.pieces.push_back(PolyPiece{-kInf, kInf, pc.origin, out});
            parts.push_back(p);
            continue;
        }
        if (pc.c.size() > 1) throw UnsupportedError("mollify supports constant density pieces or polynomials on the line");
        if (pc.c.empty()) continue;
        const double c = pc.c[0];
        auto rise = Gn;  // G(n(x - lo)) about lo
        for (double& v : rise) v *= c;
        auto fall = Gn;  // c (1 - G(n(x - hi))) about hi
        for (double& v : fall) v *= -c;
        if (fall.empty()) fall.push_back(0.0);
        fall[0] += c;
        if (std::isinf(lo)) {
            p.pieces.push_back(PolyPiece{-kInf, hi, hi, {c}});
            p.pieces.push_back(PolyPiece{hi, hi + delta, hi, fall});
        } else if (std::isinf(hi)) {
            p.pieces.push_back(PolyPiece{lo, lo + delta, lo, rise});
            p.pieces.push_back(PolyPiece{lo + delta, kInf, lo + delta, {c}});
        } else if (hi - lo >= delta) {
            p.pieces.push_back(PolyPiece{lo, lo + delta, lo, rise});
            if (hi > lo + delta) p.pieces.push_back(PolyPiece{lo + delta, hi, lo + delta, {c}});
            p.pieces.push_back(PolyPiece{hi, hi + delta, hi, fall});
        } else {
            p.pieces.push_back(PolyPiece{lo, hi, lo, rise});
            auto lower = Gn;
            for (double& v : lower) v *= c;
            auto lower_at_lo = PolyPiece{0, 0, hi, lower}.shifted(lo).c;
            std::vector<double> middle = rise;
            for (std::size_t k = 0; k < lower_at_lo.size(); ++k) middle[k] -= lower_at_lo[k];
            p.pieces.push_back(PolyPiece{hi, lo + delta, lo, middle});
            p.pieces.push_back(PolyPiece{lo + delta, hi + delta, hi, fall});
        }
        parts.push_back(p);
    }

    TestFunction out;
    out.anchor = f.anchor;
    out.curvature.density = PiecewisePoly::sum(parts);

    // value and slope at the anchor: integrate against g_n piece by piece
    std::vector<double> cuts{0.0, delta};
    for (double b : f.breakpoints()) {
        double z = f.anchor - b;
        if (z > 0.0 && z < delta) cuts.push_back(z);
    }
    std::sort(cuts.begin(), cuts.end());
    auto gn_at = [&](double z) {
        long double acc = 0.0L, y = static_cast<long double>(nn) * z;
        for (std::size_t k = g.g.size(); k-- > 0;) acc = acc * y + g.g[k];
        return static_cast<long double>(nn) * acc;
    };
    double value = 0.0, slope = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        value += gauss8([&](double z) { return gn_at(z) * f(f.anchor - z); }, cuts[i], cuts[i + 1]);
        slope += gauss8([&](double z) { return gn_at(z) * f.left_derivative(f.anchor - z); }, cuts[i], cuts[i + 1]);
    }
    out.value_at_anchor = value;
    out.slope_at_anchor = slope;
    return out;
}

}  // namespace pathlt
