#pragma once

#include <functional>
#include <string>
#include <vector>

#include "pathlt/partition.hpp"

namespace pathlt {

using RealFn = std::function<double(double)>;

// x_{t_j ∧ t} for the partition points before t, followed by x_t.
std::vector<double> clamped_values(const Path& x, const Partition& pi, double t);
// x at ((t_k ∧ t) ∨ s), the distinct values only.
std::vector<double> window_values(const Path& x, const Partition& pi, double s, double t);

double qv(const Path& x, const Partition& pi, double t);
double qv_increment(const Path& x, const Partition& pi, double s, double t);
double weighted_qv_sum(const Path& x, const Partition& pi, const RealFn& f, double t);

struct QvCurve {
    std::vector<double> checkpoints;
    std::vector<double> values;
    double oscillation = 0.0;  // at the last checkpoint
    json partition_info;

    std::string to_csv() const;
    json header() const;
};

QvCurve qv_curve(const Path& x, const Partition& pi, const std::vector<double>& checkpoints);

// Sup distance between successive curves (Cauchy diagnostic).
std::vector<double> cauchy_gaps(const std::vector<QvCurve>& curves);

}  // namespace pathlt
