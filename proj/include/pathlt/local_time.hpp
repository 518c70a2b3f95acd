#pragma once

#include <string>
#include <vector>

#include "pathlt/functions.hpp"
#include "pathlt/partition.hpp"

namespace pathlt {

// Right-continuous piecewise-linear function of the level u with jumps.
// On [knots[i], knots[i+1]) the value is right[i] + slope[i] (u - knots[i]);
// left[i] is the limit from below at knots[i]. Zero outside the knots.
struct LocalTimeProfile {
    std::vector<double> knots;
    std::vector<double> left;
    std::vector<double> right;
    std::vector<double> slope;

    // Profile of 2 sum 1_[min,max)(u) |v[j+1] - u| over successive values.
    static LocalTimeProfile from_values(const std::vector<double>& v);

    bool empty() const { return knots.empty(); }
    double eval(double u) const;
    double left_limit(double u) const;
    double mass() const;
    double max_value() const;
    double support_min() const { return knots.empty() ? 0.0 : knots.front(); }
    double support_max() const { return knots.empty() ? 0.0 : knots.back(); }
    // Sup distance to another profile (checked at every knot of both, both sides).
    double distance(const LocalTimeProfile& o) const;

    std::string to_csv() const;
    json to_json() const;
};

LocalTimeProfile discrete_local_time(const Path& x, const Partition& pi, double t);
// Direct evaluation of the defining sum at one level.
double local_time_at(const std::vector<double>& values, double u);

struct CrossingRecord {
    std::vector<double> up_times;    // t_j of completed cells counted as upcrossing pieces
    std::vector<double> down_times;
    double up_sum = 0.0;             // sum (x_{t_{j+1}} - u) over up cells
    double down_sum = 0.0;           // sum (u - x_{t_{j+1}}) over down cells
    double boundary = 0.0;           // incomplete last cell
    double reconstruct() const { return 2.0 * (up_sum + down_sum + boundary); }
};

CrossingRecord crossing_decomposition(const Path& x, const Partition& pi, double t, double u);

struct CrossingCounts {
    long long up = 0;
    long long down = 0;
    std::vector<double> tau;    // hits of u + eps
    std::vector<double> sigma;  // hits of u, sigma[0] = 0 excluded
};

CrossingCounts crossing_counts(const Path& x, double u, double eps, double t, double tol = -1.0);
double levy_downcross_estimate(const Path& x, double u, double eps, double t, double tol = -1.0);

// Discrete local time at the grid level u along the Lebesgue partition of
// the uniform grid with spacing eps, without building the partition.
double lebesgue_local_time_at(const Path& x, double eps, double t, double u = 0.0);

double lp_norm(const LocalTimeProfile& L, double p);
double pair_against(const LocalTimeProfile& L, const CurvatureMeasure& mu);
double pair_density(const LocalTimeProfile& L, const PiecewisePoly& h);

}  // namespace pathlt
