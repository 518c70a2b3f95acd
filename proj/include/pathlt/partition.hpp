#pragma once

#include <string>
#include <vector>

#include "pathlt/path.hpp"

namespace pathlt {

// Finite strictly increasing list of times. `closed` records whether the last
// time is the end of the interval the partition was built for.
struct Partition {
    std::vector<double> times;
    bool closed = true;

    Partition() = default;
    explicit Partition(std::vector<double> t, bool is_closed = true);

    std::size_t size() const { return times.size(); }
    std::size_t cells() const { return times.empty() ? 0 : times.size() - 1; }
    double start() const { return times.front(); }
    double end() const { return times.back(); }
    bool contains(double t) const;
    bool refines(const Partition& coarse) const;  // coarse ⊆ *this
    bool operator==(const Partition& o) const { return times == o.times; }

    json to_json() const { return times; }
    static Partition from_json(const json& j);
    std::string to_csv() const;
    static Partition from_csv(const std::string& text);
};

// Value levels. Uniform grids are the multiples of `spacing`; explicit grids
// list a finite window of levels that must contain 0.
struct ValueGrid {
    double spacing = 0.0;
    std::vector<double> levels;

    static ValueGrid uniform(double h);
    static ValueGrid explicit_levels(std::vector<double> v);

    bool is_uniform() const { return levels.empty(); }
    // Level with index j; +-inf outside an explicit window.
    double level(long long j) const;
    // Largest index whose level is <= v.
    long long floor_index(double v) const;
    json to_json() const;
};

double oscillation(const Path& x, const Partition& pi, double t);
Partition lebesgue_partition(const Path& x, const ValueGrid& grid, double horizon, double tol = -1.0);
Partition dyadic_partition(int n, double horizon = 1.0);
Partition merge(const Partition& a, const Partition& b);
Partition restrict(const Partition& pi, double s, double t);
Partition freedman_scale(const Path& x, const Partition& pi, long long k, double tol = -1.0);

std::vector<Partition> read_partition_sequence(const json& j);
json write_partition_sequence(const std::vector<Partition>& seq);

}  // namespace pathlt
