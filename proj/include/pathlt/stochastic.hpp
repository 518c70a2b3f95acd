#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "pathlt/partition.hpp"

namespace pathlt {

Path brownian(std::uint64_t seed, BridgeOptions opt = {});
// Brownian path plus the integral of the drift rate sum_k c_k t^k.
Path semimartingale(std::uint64_t seed, std::vector<double> drift_rate, BridgeOptions opt = {});

// 2 eps D^eps_t(u): downcrossings of [u, u+eps] scaled to the normalization
// of the discrete local time profile (|x_t| - |x_0| = sum sgn dx + L_t(0)).
double classical_local_time_oracle(const Path& x, double u, double t, double eps);
// Guaranteed |L^{Lebesgue(eps)}_t(u) - oracle| bound for grids anchored at u.
double oracle_bias_bound(double eps);

// n -> partition. dyadic: k 2^-n T; lebesgue: uniform value grid of spacing 2^-n.
struct PartitionFamily {
    enum class Kind { dyadic, lebesgue };
    Kind kind = Kind::dyadic;
    static PartitionFamily dyadic() { return {}; }
    static PartitionFamily lebesgue() { return {Kind::lebesgue}; }
    Partition at(const Path& x, int n) const;
    std::string id() const;
    static PartitionFamily parse(const std::string& s);
};

using PathGenerator = std::function<Path(std::uint64_t)>;

struct McOptions {
    double oracle_eps = 1.0 / 65536.0;
    int checkpoint_depth = 8;
    int oscillation_seeds = 2;  // exact oscillation on the first few seeds only
};

struct McRow {
    int n = 0;
    double u = 0.0;
    double p = 2.0;
    double estimate = 0.0;
    double std_error = 0.0;
    double oscillation = 0.0;  // mean over the oscillation seeds
};

struct McReport {
    std::string family;
    std::vector<int> stages;
    std::vector<double> levels;
    std::vector<double> exponents;
    double t = 1.0;
    std::vector<std::uint64_t> seeds;
    McOptions options;
    double oracle_bias = 0.0;
    std::vector<McRow> rows;
    const McRow& row(int n, double u, double p) const;
    json to_json() const;
    std::string to_csv() const;  // one row per (n, p), one column per u
};

// h^{pi_n}(u) = || sup_{s in checkpoints, s <= t} |L^{pi_n}_s(u) - oracle_s(u)| ||_p over seeds.
McReport mc_discrepancy(const PathGenerator& paths, const PartitionFamily& family, const std::vector<int>& stages,
                        const std::vector<double>& levels, const std::vector<double>& exponents, double t,
                        const std::vector<std::uint64_t>& seeds, McOptions opt = {});

// Local time along pi at level u for each checkpoint s (clamped partition at s).
std::vector<double> local_time_at_checkpoints(const Path& x, const Partition& pi, double u,
                                              const std::vector<double>& checkpoints);

}  // namespace pathlt
