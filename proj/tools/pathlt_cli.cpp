// Command-line driver for the pathwise local time library.
//
// Every subcommand reads its settings from flags and/or a JSON document given
// with --config (flags win).  Unknown config keys are rejected.  Results go to
// stdout as CSV (default) or JSON; with --out or PATHLT_OUT set, a CSV file and
// a JSON sidecar holding the full settings are written as well.
//
// Exit codes: 0 ok, 1 bad config or input, 2 a checked identity failed.

#include <cmath>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "pathlt/acceptance.hpp"
#include "pathlt/calculus.hpp"
#include "pathlt/constructions.hpp"
#include "pathlt/io.hpp"
#include "pathlt/local_time.hpp"
#include "pathlt/quadvar.hpp"
#include "pathlt/stochastic.hpp"

using namespace pathlt;

namespace {

struct AssertionFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------- specs

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

double to_double(const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw ConfigError("not a number: '" + s + "'");
    }
    if (used != s.size()) throw ConfigError("not a number: '" + s + "'");
    return v;
}

std::vector<double> to_doubles(const std::string& s) {
    std::vector<double> v;
    for (const auto& p : split(s, ','))
        if (!p.empty()) v.push_back(to_double(p));
    return v;
}

Path path_from(const json& j) {
    if (j.is_string()) return parse_path(j.get<std::string>());
    return Path::from_json(j);
}

// dyadic:n | lebesgue:h | cantor:n | file:<csv> | t0,t1,...  (or a JSON array of times)
Partition partition_from(const json& j, const Path& x) {
    if (j.is_array()) return Partition::from_json(j);
    const std::string s = j.get<std::string>();
    auto parts = split(s, ':');
    if (parts.size() == 2 && parts[0] == "dyadic") return dyadic_partition(static_cast<int>(to_double(parts[1])), x.horizon());
    if (parts.size() == 2 && parts[0] == "lebesgue")
        return lebesgue_partition(x, ValueGrid::uniform(to_double(parts[1])), x.horizon());
    if (parts.size() == 2 && parts[0] == "cantor") return cantor_partitions(static_cast<int>(to_double(parts[1])), CantorSchedule::standard());
    if (parts.size() >= 2 && parts[0] == "file") return Partition::from_csv(read_text_file(s.substr(5)));
    if (parts.size() == 1) return Partition(to_doubles(s));
    throw ConfigError("unknown partition spec: " + s);
}

// power:p | poly:w1,w2,...
TimeMap time_map_from(const json& j) {
    if (j.is_object()) return TimeMap::from_json(j);
    auto parts = split(j.get<std::string>(), ':');
    if (parts.size() == 2 && parts[0] == "power") return TimeMap::power(to_double(parts[1]));
    if (parts.size() == 2 && parts[0] == "poly") return TimeMap::poly(to_doubles(parts[1]));
    if (parts.size() == 1 && parts[0] == "identity") return TimeMap::identity();
    throw ConfigError("unknown time map: " + j.dump());
}

// affine:a,b | exp:rate | logistic:rate,centre
ValueMap value_map_from(const json& j) {
    if (j.is_object()) return ValueMap::from_json(j);
    auto parts = split(j.get<std::string>(), ':');
    auto v = parts.size() > 1 ? to_doubles(parts[1]) : std::vector<double>{};
    if (parts[0] == "affine" && !v.empty()) return ValueMap::affine(v[0], v.size() > 1 ? v[1] : 0.0);
    if (parts[0] == "exp") return ValueMap::exp(v.empty() ? 1.0 : v[0]);
    if (parts[0] == "logistic") return ValueMap::logistic(v.empty() ? 1.0 : v[0], v.size() > 1 ? v[1] : 0.0);
    throw ConfigError("unknown value map: " + j.dump());
}

// zero | linear:s | qv:<partition> | JSON schedule
TargetSchedule target_from(const json& j, const Path& x) {
    if (j.is_object()) return TargetSchedule::from_json(j);
    const std::string s = j.get<std::string>();
    if (s == "zero") return TargetSchedule::zero(x.horizon());
    auto parts = split(s, ':');
    if (parts.size() == 2 && parts[0] == "linear") return TargetSchedule::linear(to_double(parts[1]), x.horizon());
    if (parts.size() >= 2 && parts[0] == "qv") return TargetSchedule::qv_curve(x, partition_from(s.substr(3), x));
    if (parts.size() >= 2 && parts[0] == "file") return TargetSchedule::from_json(read_json_file(s.substr(5)));
    throw ConfigError("unknown target schedule: " + s);
}

// "1-200", "3,7,11" or a JSON array
std::vector<std::uint64_t> seeds_from(const json& j) {
    if (j.is_array()) return j.get<std::vector<std::uint64_t>>();
    if (j.is_number_integer()) return {j.get<std::uint64_t>()};
    std::vector<std::uint64_t> out;
    for (const auto& p : split(j.get<std::string>(), ',')) {
        auto r = split(p, '-');
        if (r.size() == 2) {
            auto a = static_cast<std::uint64_t>(to_double(r[0])), b = static_cast<std::uint64_t>(to_double(r[1]));
            if (b < a) throw ConfigError("bad seed range: " + p);
            for (auto s = a; s <= b; ++s) out.push_back(s);
        } else if (!p.empty()) {
            out.push_back(static_cast<std::uint64_t>(to_double(p)));
        }
    }
    if (out.empty()) throw ConfigError("empty seed list");
    return out;
}

std::vector<double> doubles_from(const json& j) {
    if (j.is_array()) return j.get<std::vector<double>>();
    if (j.is_number()) return {j.get<double>()};
    return to_doubles(j.get<std::string>());
}

std::vector<int> ints_from(const json& j) {
    std::vector<int> out;
    for (double v : doubles_from(j)) out.push_back(static_cast<int>(v));
    return out;
}

std::string crlf(const std::string& lf) {
    std::string out;
    out.reserve(lf.size() + lf.size() / 16);
    for (std::size_t i = 0; i < lf.size(); ++i) {
        if (lf[i] == '\n' && (i == 0 || lf[i - 1] != '\r')) out += '\r';
        out += lf[i];
    }
    return out;
}

// ---------------------------------------------------------------- commands

struct Output {
    json result = json::object();
    std::string csv;  // LF or CRLF; normalized on output
};

// Reads settings; a value may be a path/partition spec string or structured JSON.
class Settings {
public:
    explicit Settings(json doc) : r_(std::move(doc)) {}
    json spec(const std::string& key, const json& fallback) { return r_.get<json>(key, fallback); }
    double num(const std::string& key, double fallback) { return r_.get<double>(key, fallback); }
    int integer(const std::string& key, int fallback) { return r_.get<int>(key, fallback); }
    bool flag(const std::string& key, bool fallback) { return r_.get<bool>(key, fallback); }
    std::string str(const std::string& key, const std::string& fallback) {
        json v = r_.get<json>(key, fallback);
        return v.is_string() ? v.get<std::string>() : v.dump();
    }
    void finish() const { r_.finish(); }
    const json& recorded() const { return r_.settings(); }

private:
    ConfigReader r_;
};

std::string row(std::initializer_list<std::string> f) { return csv_row(std::vector<std::string>(f)); }

void check(bool ok, const std::string& what) {
    if (!ok) throw AssertionFailure(what);
}

Output cmd_qv(Settings& s) {
    Path x = path_from(s.spec("path", "zigzag"));
    Partition pi = partition_from(s.spec("partition", "dyadic:4"), x);
    double t = s.num("t", x.horizon());
    s.finish();
    std::vector<double> cps;
    for (double v : pi.times)
        if (v < t) cps.push_back(v);
    cps.push_back(t);
    auto curve = qv_curve(x, pi, cps);
    Output o;
    o.result = {{"qv", curve.values.back()}, {"oscillation", curve.oscillation}, {"points", pi.size()}};
    o.csv = curve.to_csv();
    return o;
}

Output cmd_ltime(Settings& s) {
    Path x = path_from(s.spec("path", "zigzag"));
    Partition pi = partition_from(s.spec("partition", "dyadic:4"), x);
    double t = s.num("t", x.horizon());
    auto at = doubles_from(s.spec("u", json::array()));
    double p = s.num("p", 2.0);
    s.finish();
    auto L = discrete_local_time(x, pi, t);
    Output o;
    json vals = json::array();
    for (double u : at) vals.push_back({{"u", u}, {"L", L.eval(u)}});
    o.result = {{"mass", L.mass()}, {"qv", qv(x, pi, t)}, {"max", L.max_value()}, {"lp_norm", lp_norm(L, p)}, {"values", vals}};
    o.csv = L.to_csv();
    return o;
}

Output cmd_crossings(Settings& s) {
    Path x = path_from(s.spec("path", "bridge:1"));
    double u = s.num("u", 0.0), eps = s.num("eps", 1.0 / 64), t = s.num("t", x.horizon());
    json pspec = s.spec("partition", nullptr);
    s.finish();
    auto cc = crossing_counts(x, u, eps, t);
    Output o;
    o.result = {{"up", cc.up}, {"down", cc.down}, {"eps_times_down", eps * static_cast<double>(cc.down)}};
    o.csv = row({"kind", "index", "time"});
    for (std::size_t i = 0; i < cc.tau.size(); ++i) o.csv += row({"tau", std::to_string(i + 1), fmt(cc.tau[i])});
    for (std::size_t i = 0; i < cc.sigma.size(); ++i) o.csv += row({"sigma", std::to_string(i + 1), fmt(cc.sigma[i])});
    if (!pspec.is_null()) {
        Partition pi = partition_from(pspec, x);
        auto rec = crossing_decomposition(x, pi, t, u);
        double L = local_time_at(clamped_values(x, pi, t), u);
        o.result["decomposition"] = {{"up_cells", rec.up_times.size()}, {"down_cells", rec.down_times.size()},
                                     {"up_sum", rec.up_sum},           {"down_sum", rec.down_sum},
                                     {"boundary", rec.boundary},       {"reconstructed", rec.reconstruct()},
                                     {"local_time", L}};
    }
    return o;
}

Output cmd_tanaka(Settings& s) {
    Path x = path_from(s.spec("path", "zigzag"));
    Partition pi = partition_from(s.spec("partition", "dyadic:4"), x);
    TestFunction f = parse_function(s.str("f", "abs(u)"));
    double t = s.num("t", x.horizon()), tol = s.num("tol", 1e-10);
    bool assert_ = s.flag("assert", false);
    s.finish();
    auto tt = tanaka_terms(x, pi, f, t);
    Output o;
    o.result = tt.to_json();
    o.csv = row({"f_end", "f_start", "riemann", "pairing", "residual", "scale"}) +
            row({fmt(tt.f_end), fmt(tt.f_start), fmt(tt.riemann), fmt(tt.pairing), fmt(tt.residual), fmt(tt.scale)});
    if (assert_) check(std::fabs(tt.residual) <= tol * tt.scale, "Tanaka residual above tolerance");
    return o;
}

Output cmd_ito(Settings& s) {
    Path x = path_from(s.spec("path", "bridge:1"));
    Partition pi = partition_from(s.spec("partition", "dyadic:8"), x);
    TestFunction f = parse_function(s.str("f", "u^2"));
    double t = s.num("t", x.horizon());
    bool assert_ = s.flag("assert", false);
    s.finish();
    auto it = ito_terms(x, pi, f, t, true);
    Output o;
    o.result = it.to_json();
    o.csv = row({"f_end", "f_start", "riemann", "weighted", "residual", "bound", "oscillation"}) +
            row({fmt(it.f_end), fmt(it.f_start), fmt(it.riemann), fmt(it.weighted), fmt(it.residual), fmt(it.bound),
                 fmt(it.oscillation)});
    if (assert_) check(std::fabs(it.residual) <= it.bound * (1 + 1e-10) + 1e-14, "Ito residual above its bound");
    return o;
}

Output cmd_occupation(Settings& s) {
    Path x = path_from(s.spec("path", "bridge:1"));
    Partition pi = partition_from(s.spec("partition", "dyadic:8"), x);
    PiecewisePoly h = parse_weight(s.str("weight", "1"));
    double t = s.num("t", x.horizon());
    s.finish();
    double r = occupation_residual(x, pi, h, t);
    Output o;
    o.result = {{"residual", r}};
    o.csv = row({"residual"}) + row({fmt(r)});
    return o;
}

Output cmd_cov(Settings& s) {
    Path x = path_from(s.spec("path", "bridge:1"));
    Partition pi = partition_from(s.spec("partition", "dyadic:8"), x);
    ValueMap phi = value_map_from(s.spec("phi", "exp:1"));
    double t = s.num("t", x.horizon());
    auto us = doubles_from(s.spec("u", 0.0));
    bool assert_ = s.flag("assert", false);
    s.finish();
    auto w = path_window(x, pi, t);
    Output o;
    o.csv = row({"u", "lhs", "rhs", "bound", "holds"});
    json rows = json::array();
    bool all = true;
    for (double u : us) {
        auto c = change_of_variable_check(w, phi, u);
        all = all && c.holds;
        rows.push_back(c.to_json());
        o.csv += row({fmt(u), fmt(c.lhs), fmt(c.rhs), fmt(c.bound), c.holds ? "true" : "false"});
    }
    o.result = {{"checks", rows}, {"all_hold", all}};
    if (assert_) check(all, "change-of-variables bound violated");
    return o;
}

Output cmd_timechange(Settings& s) {
    Path x = path_from(s.spec("path", "bridge:1"));
    Partition pi = partition_from(s.spec("partition", "dyadic:8"), x);
    TimeMap tau = time_map_from(s.spec("tau", "power:2"));
    double t = s.num("t", x.horizon());
    bool assert_ = s.flag("assert", false);
    s.finish();
    double d = time_change_check(x, tau, pi, t);
    Output o;
    o.result = {{"distance", d}};
    o.csv = row({"distance"}) + row({fmt(d)});
    if (assert_) check(d == 0.0, "time-changed profile differs");
    return o;
}

Output cmd_mollify(Settings& s) {
    Path x = path_from(s.spec("path", "bridge:1"));
    Partition pi = partition_from(s.spec("partition", "dyadic:12"), x);
    TestFunction f = parse_function(s.str("f", "abs(u)"));
    auto ns = ints_from(s.spec("n", "4,16,64,256"));
    double t = s.num("t", x.horizon()), u = s.num("u", 0.0);
    s.finish();
    auto L = discrete_local_time(x, pi, t);
    // for f = |. - u| the limit of the pairing is 2 L(u+)
    const double limit = pair_against(L, f.curvature);
    Output o;
    o.csv = row({"n", "f_n(u)", "pairing", "gap"});
    json rows = json::array();
    for (int n : ns) {
        auto fn = mollify(f, n);
        double p = pair_against(L, fn.curvature);
        rows.push_back({{"n", n}, {"value", fn(u)}, {"pairing", p}, {"gap", std::fabs(p - limit)}});
        o.csv += row({std::to_string(n), fmt(fn(u)), fmt(p), fmt(std::fabs(p - limit))});
    }
    o.result = {{"limit", limit}, {"rows", rows}};
    return o;
}

Output cmd_cantor(Settings& s) {
    int stages = s.integer("n", 5);
    json sched = s.spec("schedule", "standard");
    auto us = doubles_from(s.spec("u", "0.1"));
    s.finish();
    CantorSchedule cs = CantorSchedule::standard();
    if (sched.is_object()) cs = CantorSchedule::from_json(sched);
    else if (sched != "standard") {
        auto parts = split(sched.get<std::string>(), ':');
        if (parts.size() != 2 || parts[0] != "constant") throw ConfigError("unknown schedule: " + sched.dump());
        cs = CantorSchedule::constant(static_cast<long long>(to_double(parts[1])));
    }
    Output o;
    std::vector<std::string> head{"n", "stage_qv", "geometric_sum", "osc_in_gaps", "osc_between"};
    for (double u : us) head.push_back("L(" + fmt(u) + ")");
    o.csv = csv_row(head);
    json rows = json::array();
    for (int n = 1; n <= stages; ++n) {
        auto osc = cantor_oscillation(n, cs);
        double q = cantor_stage_qv(n, cs);
        std::vector<std::string> f{std::to_string(n), fmt(q), fmt(cantor_geometric_sum(n)), fmt(osc.in_gaps), fmt(osc.between)};
        json L = json::array();
        for (double u : us) {
            L.push_back(cantor_local_time_at(n, cs, u));
            f.push_back(fmt(L.back().get<double>()));
        }
        o.csv += csv_row(f);
        rows.push_back({{"n", n}, {"stage_qv", q}, {"oscillation", osc.total}, {"local_time", L}});
    }
    o.result = {{"schedule", cs.to_json()}, {"stages", rows}};
    return o;
}

Output cmd_blowup(Settings& s) {
    Path x = path_from(s.spec("path", "bridge:3"));
    double c = s.num("c", 0.0), d = s.num("d", x.horizon()), target = s.num("target", 3.0);
    int budget = s.integer("budget", 24);
    std::string strat = s.str("strategy", "extrema");
    s.finish();
    if (strat != "extrema" && strat != "vitali") throw ConfigError("strategy must be extrema or vitali");
    auto r = blowup_partition(x, c, d, target, budget, strat == "vitali" ? BlowupStrategy::vitali : BlowupStrategy::extrema);
    Output o;
    o.result = r.to_json();
    o.result.erase("partition");
    o.result["points"] = r.partition.size();
    o.csv = crlf(r.partition.to_csv());
    return o;
}

Output cmd_forge(Settings& s) {
    Path x = path_from(s.spec("path", "bridge:3"));
    TargetSchedule a = target_from(s.spec("target", "linear:0.5"), x);
    int n = s.integer("n", 4);
    Partition base = partition_from(s.spec("base", "dyadic:2"), x);
    TargetOptions opt;
    opt.budget_depth = s.integer("budget", opt.budget_depth);
    opt.tolerance = s.num("tolerance", opt.tolerance);
    s.finish();
    auto r = target_qv_partitions(x, a, n, base, opt);
    Output o;
    o.result = r.to_json();
    o.csv = r.to_csv();
    if (!r.achieved) o.result["note"] = "some cells missed their target; see status";
    return o;
}

Output cmd_levy(Settings& s) {
    Path x = path_from(s.spec("path", "bridge:1"));
    double u = s.num("u", 0.0), t = s.num("t", x.horizon());
    auto epss = doubles_from(s.spec("eps", "0.015625"));
    s.finish();
    Output o;
    o.csv = row({"eps", "oracle", "bias_bound"});
    json rows = json::array();
    for (double e : epss) {
        double v = classical_local_time_oracle(x, u, t, e);
        rows.push_back({{"eps", e}, {"oracle", v}, {"bias_bound", oracle_bias_bound(e)}});
        o.csv += row({fmt(e), fmt(v), fmt(oracle_bias_bound(e))});
    }
    o.result = {{"rows", rows}};
    return o;
}

Output cmd_mc(Settings& s) {
    auto family = PartitionFamily::parse(s.str("family", "dyadic"));
    auto stages = ints_from(s.spec("stages", "8,10,12,14"));
    auto levels = doubles_from(s.spec("levels", "0"));
    auto exps = doubles_from(s.spec("exponents", "2"));
    auto seeds = seeds_from(s.spec("seeds", "1-20"));
    auto drift = doubles_from(s.spec("drift", json::array()));
    double t = s.num("t", 1.0);
    McOptions opt;
    opt.oracle_eps = s.num("oracle_eps", opt.oracle_eps);
    opt.checkpoint_depth = s.integer("checkpoint_depth", opt.checkpoint_depth);
    opt.oscillation_seeds = s.integer("oscillation_seeds", opt.oscillation_seeds);
    s.finish();
    PathGenerator gen = [drift](std::uint64_t seed) {
        return drift.empty() ? brownian(seed) : semimartingale(seed, drift);
    };
    auto rep = mc_discrepancy(gen, family, stages, levels, exps, t, seeds, opt);
    Output o;
    o.result = rep.to_json();
    o.csv = rep.to_csv();
    return o;
}

Output cmd_selftest(Settings& s) {
    AcceptanceOptions opt;
    opt.baseline = s.str("baseline", "");
    opt.update_baseline = s.flag("update", false);
    opt.only = ints_from(s.spec("only", json::array()));
    s.finish();
    auto rep = run_acceptance(opt, std::cerr);
    Output o;
    o.result = rep.to_json();
    o.csv = row({"id", "name", "pass", "seconds", "detail"});
    for (const auto& r : rep.results)
        o.csv += row({std::to_string(r.id), r.name, r.pass ? "PASS" : "FAIL", fmt(r.seconds), r.detail});
    if (!rep.all_pass()) {
        o.result["failed"] = true;
    }
    return o;
}

struct Command {
    const char* name;
    const char* help;
    std::vector<std::pair<const char*, const char*>> options;  // key, help
    std::function<Output(Settings&)> run;
};

const char* kPath = "path spec: zigzag | cantor | constant:c | linear:a,b | bridge:seed | drifted:seed:c0,c1 | pl:t,x;t,x...";
const char* kPart = "partition: dyadic:n | lebesgue:h | cantor:n | file:<csv> | t0,t1,...";

std::vector<Command> commands() {
    return {
        {"qv", "quadratic variation along a partition", {{"path", kPath}, {"partition", kPart}, {"t", "end time"}}, cmd_qv},
        {"ltime", "discrete local time profile",
         {{"path", kPath}, {"partition", kPart}, {"t", "end time"}, {"u", "levels to evaluate"}, {"p", "Lp exponent"}}, cmd_ltime},
        {"crossings", "up/down crossing counts and the cell decomposition",
         {{"path", kPath}, {"partition", kPart}, {"t", "end time"}, {"u", "level"}, {"eps", "band width"}}, cmd_crossings},
        {"tanaka", "discrete Tanaka-Meyer terms",
         {{"path", kPath}, {"partition", kPart}, {"t", "end time"}, {"f", "test function"}, {"tol", "relative tolerance"},
          {"assert", "exit 2 when the residual exceeds tol*scale"}},
         cmd_tanaka},
        {"ito", "Ito formula residual and its bound",
         {{"path", kPath}, {"partition", kPart}, {"t", "end time"}, {"f", "smooth test function"}, {"assert", "exit 2 above bound"}}, cmd_ito},
        {"occupation", "occupation-time residual", {{"path", kPath}, {"partition", kPart}, {"t", "end time"}, {"weight", "density h of the occupation check"}}, cmd_occupation},
        {"cov", "change of variables check",
         {{"path", kPath}, {"partition", kPart}, {"t", "end time"}, {"phi", "affine:a,b | exp:r | logistic:r,c"}, {"u", "levels"},
          {"assert", "exit 2 on violation"}},
         cmd_cov},
        {"timechange", "time change invariance",
         {{"path", kPath}, {"partition", kPart}, {"t", "end time"}, {"tau", "power:p | poly:w1,w2,..."}, {"assert", "exit 2 on mismatch"}},
         cmd_timechange},
        {"mollify", "mollified pairings against the local time",
         {{"path", kPath}, {"partition", kPart}, {"t", "end time"}, {"f", "convex test function"}, {"n", "mollifier scales"}, {"u", "evaluation point"}},
         cmd_mollify},
        {"cantor", "Cantor path construction", {{"n", "stages"}, {"schedule", "standard | constant:m"}, {"u", "levels"}}, cmd_cantor},
        {"blowup", "partition of a window with large quadratic variation",
         {{"path", kPath}, {"c", "window start"}, {"d", "window end"}, {"target", "target sum"}, {"budget", "max dyadic depth"},
          {"strategy", "extrema | vitali"}},
         cmd_blowup},
        {"forge-qv", "partitions along which the QV follows a target",
         {{"path", kPath}, {"target", "zero | linear:s | qv:<partition> | file:<json>"}, {"n", "stage"}, {"base", kPart},
          {"budget", "max dyadic depth"}, {"tolerance", "total tolerance"}},
         cmd_forge},
        {"levy", "classical local time oracle", {{"path", kPath}, {"u", "level"}, {"t", "end time"}, {"eps", "band widths"}}, cmd_levy},
        {"mc", "Monte Carlo discrepancy between discrete and classical local time",
         {{"family", "dyadic | lebesgue"}, {"stages", "n values"}, {"levels", "u values"}, {"exponents", "p values"},
          {"seeds", "e.g. 1-200"}, {"drift", "polynomial drift coefficients"}, {"t", "end time"},
          {"oracle_eps", "oracle band width"}, {"checkpoint_depth", "time grid depth"}, {"oscillation_seeds", "seeds with exact oscillation"}},
         cmd_mc},
        {"selftest", "run every acceptance check",
         {{"baseline", "regression baseline json"}, {"update", "rewrite the baseline"}, {"only", "criterion ids"}}, cmd_selftest},
    };
}

// Flag text to JSON: numbers and booleans stay typed, everything else is a string.
json flag_value(const std::string& v) {
    if (v == "true") return true;
    if (v == "false") return false;
    try {
        std::size_t used = 0;
        double d = std::stod(v, &used);
        if (used == v.size()) {
            if (v.find_first_of(".eE") == std::string::npos && std::fabs(d) < 9e15) return static_cast<long long>(d);
            return d;
        }
    } catch (const std::exception&) {
    }
    return v;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pathwise local time toolkit"};
    app.require_subcommand(1);
    std::string format = "csv", out_dir, config;
    app.add_option("--format", format, "stdout format: csv | json")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--out", out_dir, "write <command>.csv and <command>.json here (default: $PATHLT_OUT)");

    auto cmds = commands();
    std::map<std::string, std::map<std::string, std::string>> values;
    std::map<std::string, CLI::App*> subs;
    for (const auto& c : cmds) {
        auto* sub = app.add_subcommand(c.name, c.help);
        sub->add_option("--config", config, "JSON settings file");
        for (const auto& [k, h] : c.options) {
            std::string flag = std::string("--") + k;
            for (auto& ch : flag)
                if (ch == '_') ch = '-';
            if (std::string(k) == "assert" || std::string(k) == "update")
                sub->add_flag_function(flag, [&values, c, k = std::string(k)](std::int64_t) { values[c.name][k] = "true"; }, h);
            else
                sub->add_option_function<std::string>(flag, [&values, c, k = std::string(k)](const std::string& v) { values[c.name][k] = v; }, h);
        }
        subs[c.name] = sub;
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        std::cerr << json{{"error", "usage"}, {"message", e.what()}}.dump() << std::endl;
        return 1;
    }

    for (const auto& c : cmds) {
        if (!subs[c.name]->parsed()) continue;
        try {
            json doc = config.empty() ? json::object() : read_json_file(config);
            if (!doc.is_object()) throw ConfigError("config must be a JSON object");
            for (const auto& [k, v] : values[c.name]) doc[k] = flag_value(v);
            Settings s(doc);
            Output o = c.run(s);
            const bool failed = o.result.value("failed", false);
            json report = {{"command", c.name}, {"settings", s.recorded()}, {"result", o.result}};
            const std::string csv = crlf(o.csv);
            if (format == "json") std::cout << report.dump(2) << "\n";
            else std::cout << csv;
            if (!out_dir.empty() || std::getenv("PATHLT_OUT")) write_plot_data(output_dir(out_dir), c.name, csv, report);
            if (failed) {
                std::cerr << json{{"error", "assertion"}, {"message", "acceptance checks failed"}}.dump() << std::endl;
                return 2;
            }
            return 0;
        } catch (const AssertionFailure& e) {
            std::cerr << json{{"error", "assertion"}, {"message", e.what()}}.dump() << std::endl;
            return 2;
        } catch (const ConfigError& e) {
            std::cerr << json{{"error", "config"}, {"message", e.what()}}.dump() << std::endl;
            return 1;
        } catch (const json::exception& e) {
            std::cerr << json{{"error", "config"}, {"message", e.what()}}.dump() << std::endl;
            return 1;
        } catch (const std::exception& e) {
            std::cerr << json{{"error", "input"}, {"message", e.what()}}.dump() << std::endl;
            return 1;
        }
    }
    return 1;
}
