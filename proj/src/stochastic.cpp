#include "pathlt/stochastic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pathlt/local_time.hpp"

namespace pathlt {

Path brownian(std::uint64_t seed, BridgeOptions opt) { return bridge(seed, opt); }

Path semimartingale(std::uint64_t seed, std::vector<double> drift_rate, BridgeOptions opt) {
    return drifted(seed, std::move(drift_rate), opt);
}

double classical_local_time_oracle(const Path& x, double u, double t, double eps) {
    return 2.0 * levy_downcross_estimate(x, u, eps, t);
}

double oracle_bias_bound(double eps) { return 4.0 * eps; }

Partition PartitionFamily::at(const Path& x, int n) const {
    if (kind == Kind::dyadic) return dyadic_partition(n, x.horizon());
    return lebesgue_partition(x, ValueGrid::uniform(std::ldexp(1.0, -n)), x.horizon());
}

std::string PartitionFamily::id() const { return kind == Kind::dyadic ? "dyadic" : "lebesgue"; }

PartitionFamily PartitionFamily::parse(const std::string& s) {
    if (s == "dyadic") return dyadic();
    if (s == "lebesgue") return lebesgue();
    throw DomainError("unknown partition family: " + s);
}

std::vector<double> local_time_at_checkpoints(const Path& x, const Partition& pi, double u,
                                              const std::vector<double>& checkpoints) {
    auto v = x.eval_many(pi.times);
    auto term = [u](double a, double b) {
        const double lo = std::min(a, b), hi = std::max(a, b);
        return (u >= lo && u < hi) ? 2.0 * std::fabs(b - u) : 0.0;
    };
    std::vector<double> out;
    out.reserve(checkpoints.size());
    double cum = 0.0;
    std::size_t j = 0;  // cells before j are summed into cum
    for (double s : checkpoints) {
        while (j + 1 < pi.size() && pi.times[j + 1] <= s) {
            cum += term(v[j], v[j + 1]);
            ++j;
        }
        out.push_back(pi.times[j] == s || j + 1 >= pi.size() ? cum : cum + term(v[j], x.eval(s)));
    }
    return out;
}

const McRow& McReport::row(int n, double u, double p) const {
    for (const auto& r : rows)
        if (r.n == n && r.u == u && r.p == p) return r;
    throw DomainError("no such report row");
}

json McReport::to_json() const {
    json rj = json::array();
    for (const auto& r : rows)
        rj.push_back({{"n", r.n}, {"u", r.u}, {"p", r.p}, {"estimate", r.estimate}, {"std_error", r.std_error},
                      {"oscillation", r.oscillation}});
    return {{"family", family},
            {"stages", stages},
            {"levels", levels},
            {"exponents", exponents},
            {"t", t},
            {"seeds", seeds},
            {"oracle_eps", options.oracle_eps},
            {"oracle_bias", oracle_bias},
            {"checkpoint_depth", options.checkpoint_depth},
            {"oscillation_seeds", options.oscillation_seeds},
            {"rows", rj}};
}

std::string McReport::to_csv() const {
    std::ostringstream os;
    os.precision(17);
    os << "n,p";
    for (double u : levels) os << ",u=" << u;
    os << '\n';
    for (int n : stages)
        for (double p : exponents) {
            os << n << ',' << p;
            for (double u : levels) os << ',' << row(n, u, p).estimate;
            os << '\n';
        }
    return os.str();
}

McReport mc_discrepancy(const PathGenerator& paths, const PartitionFamily& family, const std::vector<int>& stages,
                        const std::vector<double>& levels, const std::vector<double>& exponents, double t,
                        const std::vector<std::uint64_t>& seeds, McOptions opt) {
    if (seeds.empty()) throw DomainError("Monte Carlo needs at least one seed");
    for (double p : exponents)
        if (!(p >= 1.0)) throw DomainError("exponent must be >= 1");
    McReport rep;
    rep.family = family.id();
    rep.stages = stages;
    rep.levels = levels;
    rep.exponents = exponents;
    rep.t = t;
    rep.seeds = seeds;
    rep.options = opt;
    rep.oracle_bias = oracle_bias_bound(opt.oracle_eps);

    std::vector<double> checkpoints;
    const auto grid = dyadic_partition(opt.checkpoint_depth, t);
    for (double s : grid.times) checkpoints.push_back(s);

    const std::size_t S = seeds.size(), N = stages.size(), U = levels.size();
    // sups[(n * U + u) * S + seed]
    std::vector<double> sups(N * U * S, 0.0);
    std::vector<double> osc(N, 0.0);
    int osc_count = 0;
    for (std::size_t si = 0; si < S; ++si) {
        const Path x = paths(seeds[si]);
        std::vector<std::vector<double>> oracle(U);
        for (std::size_t ui = 0; ui < U; ++ui) {
            auto c = crossing_counts(x, levels[ui], opt.oracle_eps, t);
            oracle[ui].reserve(checkpoints.size());
            for (double s : checkpoints) {
                auto cnt = std::upper_bound(c.sigma.begin(), c.sigma.end(), s) - c.sigma.begin();
                oracle[ui].push_back(2.0 * opt.oracle_eps * static_cast<double>(cnt));
            }
        }
        const bool with_osc = static_cast<int>(si) < opt.oscillation_seeds;
        if (with_osc) ++osc_count;
        for (std::size_t ni = 0; ni < N; ++ni) {
            const Partition pi = family.at(x, stages[ni]);
            if (with_osc) osc[ni] += oscillation(x, pi, t);
            for (std::size_t ui = 0; ui < U; ++ui) {
                auto L = local_time_at_checkpoints(x, pi, levels[ui], checkpoints);
                double sup = 0.0;
                for (std::size_t k = 0; k < checkpoints.size(); ++k) sup = std::max(sup, std::fabs(L[k] - oracle[ui][k]));
                sups[(ni * U + ui) * S + si] = sup;
            }
        }
    }
    for (std::size_t ni = 0; ni < N; ++ni)
        for (std::size_t ui = 0; ui < U; ++ui)
            for (double p : exponents) {
                // fixed-order reduction over seeds
                double mean = 0.0, sq = 0.0;
                for (std::size_t si = 0; si < S; ++si) {
                    double y = std::pow(sups[(ni * U + ui) * S + si], p);
                    mean += y;
                    sq += y * y;
                }
                mean /= static_cast<double>(S);
                double var = S > 1 ? std::max(0.0, (sq - static_cast<double>(S) * mean * mean) / static_cast<double>(S - 1)) : 0.0;
                McRow r;
                r.n = stages[ni];
                r.u = levels[ui];
                r.p = p;
                r.estimate = std::pow(mean, 1.0 / p);
                // delta method for mean^(1/p)
                double se_mean = std::sqrt(var / static_cast<double>(S));
                r.std_error = mean > 0 ? se_mean * std::pow(mean, 1.0 / p - 1.0) / p : 0.0;
                r.oscillation = osc_count > 0 ? osc[ni] / osc_count : 0.0;
                rep.rows.push_back(r);
            }
    return rep;
}

}  // namespace pathlt
