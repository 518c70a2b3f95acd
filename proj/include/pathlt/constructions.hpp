#pragma once

#include <string>
#include <utility>
#include <vector>

#include "pathlt/partition.hpp"

namespace pathlt {

// ---------------------------------------------------------------- Cantor

// Subdivision count m(i, n) for a level-i removed interval at stage n.
struct CantorSchedule {
    enum class Kind { standard, constant, custom };
    Kind kind = Kind::standard;
    long long value = 1;                       // constant
    std::vector<std::vector<long long>> table;  // custom: table[n-1][i-1]

    static CantorSchedule standard() { return {}; }
    static CantorSchedule constant(long long m);
    static CantorSchedule custom(std::vector<std::vector<long long>> table);
    long long m(int i, int n) const;
    json to_json() const;
    static CantorSchedule from_json(const json& j);
};

// Removed interval j (0-based, left to right) of level i: length 3^-i, peak 3^(-i/2).
struct CantorGap {
    int level = 1;
    long long index = 0;
    double left = 0.0;
    double length = 0.0;
    double peak = 0.0;
};
std::vector<CantorGap> cantor_gaps(int level);

// Materialized stage-n partition; throws DomainError when it would exceed
// max_points or when neighbouring hitting times collide in double precision.
Partition cantor_partitions(int n, const CantorSchedule& s, std::size_t max_points = std::size_t{1} << 24);

// Streaming forms. Points inside a gap are kept as offsets from its left end,
// so the values are exact even where the absolute times would round together.
double cantor_interval_qv(int i, long long j, int n, const CantorSchedule& s);
double cantor_stage_qv(int n, const CantorSchedule& s, double max_cells = 1e9);
double cantor_local_time_at(int n, const CantorSchedule& s, double u);
double cantor_geometric_sum(int n);  // sum_{i=1}^n (2 / (3 2^n))^i by direct summation

struct CantorOscillation {
    double in_gaps = 0.0;   // largest cell inside a partitioned gap
    double between = 0.0;   // largest cell spanning unpartitioned regions
    double total = 0.0;
};
CantorOscillation cantor_oscillation(int n, const CantorSchedule& s);

// ---------------------------------------------------------------- blow-up

enum class BlowupStrategy { extrema, vitali };

struct BlowupResult {
    Partition partition;
    double achieved = 0.0;
    std::string status;  // achieved | saturated | budget
    int depth = 0;       // depth of the returned partition (0 for analytic)
    std::vector<std::pair<int, double>> history;  // best achieved after each depth
    json to_json() const;
};

// Best-effort partition of [c, d] with large sum of squared increments.
// Analytic piecewise-monotone paths return the exact supremum.
BlowupResult blowup_partition(const Path& x, double c, double d, double target, int budget_depth,
                              BlowupStrategy strategy = BlowupStrategy::extrema, int start_depth = -1);

// Partition of a sampled walk at the local extrema, with pairs of interior
// points dropped whenever that increases the sum of squares. Indices into v.
std::vector<std::size_t> extrema_merge(const std::vector<double>& v);

// y^2 / (2 log log(1/y)) for y < 1/e, +inf above.
double vitali_psi(double y);

// ---------------------------------------------------------------- targeting

// d(a, b) = |e^-a - e^-b| on [0, inf].
double qv_metric(double a, double b);

struct TargetSchedule {
    std::vector<double> times;   // checkpoints, strictly increasing, first 0
    std::vector<double> values;  // non-decreasing, may be +inf
    std::vector<std::pair<double, double>> jumps;  // (time, size > 0)

    static TargetSchedule zero(double horizon = 1.0);
    static TargetSchedule linear(double slope, double horizon = 1.0);
    static TargetSchedule qv_curve(const Path& x, const Partition& pi);
    double operator()(double t) const;  // interpolated samples plus jumps at times <= t
    std::vector<double> jump_times(double threshold) const;
    void validate() const;
    json to_json() const;
    static TargetSchedule from_json(const json& j);
};

struct TargetCell {
    double c = 0.0, d = 0.0;
    double target = 0.0;
    double achieved = 0.0;
    double error = 0.0;    // d(achieved, target)
    std::string status;    // achieved | saturated | short
    std::string source;    // which candidate sub-partition was trimmed
    int depth = 0;
    json to_json() const;
};

struct TargetOptions {
    int budget_depth = 22;
    double tolerance = -1.0;  // total over cells; default 2^-n
};

struct TargetResult {
    Partition partition;
    std::vector<TargetCell> cells;
    std::vector<double> anchors;
    std::vector<double> anchor_qv;
    std::vector<double> anchor_target;
    double sup_error = 0.0;  // sup over anchors of d(qv, a)
    bool achieved = true;
    json to_json() const;
    std::string to_csv() const;
};

TargetResult target_qv_partitions(const Path& x, const TargetSchedule& a, int n, const Partition& base,
                                  TargetOptions opt = {});

}  // namespace pathlt
