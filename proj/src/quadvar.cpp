#include "pathlt/quadvar.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pathlt/kernels.hpp"

namespace pathlt {

std::vector<double> clamped_values(const Path& x, const Partition& pi, double t) {
    if (!(t >= 0.0 && t <= x.horizon())) throw DomainError("time outside the horizon");
    std::vector<double> times;
    times.reserve(pi.size() + 1);
    for (double v : pi.times) {
        if (v >= t) break;
        times.push_back(v);
    }
    if (times.empty() && pi.start() > t) return {};
    times.push_back(t);
    if (t > pi.end()) times.back() = pi.end();
    return x.eval_many(times);
}

std::vector<double> window_values(const Path& x, const Partition& pi, double s, double t) {
    if (s > t) throw DomainError("window needs s <= t");
    std::vector<double> times;
    times.push_back(std::max(s, pi.start()));
    for (double v : pi.times)
        if (v > times.front() && v < t) times.push_back(v);
    double last = std::min(t, pi.end());
    if (last > times.back()) times.push_back(last);
    return x.eval_many(times);
}

double qv(const Path& x, const Partition& pi, double t) {
    auto v = clamped_values(x, pi, t);
    return kernels::sq_increment_sum(v.data(), v.size());
}

double qv_increment(const Path& x, const Partition& pi, double s, double t) {
    auto v = window_values(x, pi, s, t);
    return kernels::sq_increment_sum(v.data(), v.size());
}

double weighted_qv_sum(const Path& x, const Partition& pi, const RealFn& f, double t) {
    auto v = clamped_values(x, pi, t);
    if (v.size() < 2) return 0.0;
    std::vector<double> w(v.size() - 1);
    for (std::size_t i = 0; i + 1 < v.size(); ++i) w[i] = f(v[i]);
    return kernels::weighted_sq_increment_sum(v.data(), w.data(), v.size());
}

QvCurve qv_curve(const Path& x, const Partition& pi, const std::vector<double>& checkpoints) {
    QvCurve c;
    c.checkpoints = checkpoints;
    c.partition_info = {{"points", pi.size()}, {"start", pi.start()}, {"end", pi.end()}};
    if (checkpoints.empty()) return c;
    for (std::size_t i = 1; i < checkpoints.size(); ++i)
        if (checkpoints[i] < checkpoints[i - 1]) throw DomainError("checkpoints must be increasing");
    const double tmax = checkpoints.back();
    auto full = clamped_values(x, pi, tmax);
    std::vector<double> times;
    for (double v : pi.times) {
        if (v >= tmax) break;
        times.push_back(v);
    }
    std::vector<double> buf;
    for (double cp : checkpoints) {
        std::size_t j = static_cast<std::size_t>(std::lower_bound(times.begin(), times.end(), cp) - times.begin());
        buf.assign(full.begin(), full.begin() + static_cast<std::ptrdiff_t>(j));
        if (cp >= pi.start()) buf.push_back(x.eval(std::min(cp, pi.end())));
        c.values.push_back(kernels::sq_increment_sum(buf.data(), buf.size()));
    }
    c.oscillation = oscillation(x, pi, tmax);
    return c;
}

std::string QvCurve::to_csv() const {
    std::ostringstream os;
    os.precision(17);
    os << "t,value\n";
    for (std::size_t i = 0; i < checkpoints.size(); ++i) os << checkpoints[i] << "," << values[i] << "\n";
    return os.str();
}

json QvCurve::header() const {
    return {{"partition", partition_info}, {"oscillation", oscillation}, {"checkpoints", checkpoints.size()}};
}

std::vector<double> cauchy_gaps(const std::vector<QvCurve>& curves) {
    std::vector<double> out;
    for (std::size_t i = 1; i < curves.size(); ++i) {
        double gap = 0.0;
        const auto& a = curves[i - 1].values;
        const auto& b = curves[i].values;
        for (std::size_t k = 0; k < std::min(a.size(), b.size()); ++k) gap = std::max(gap, std::fabs(a[k] - b[k]));
        out.push_back(gap);
    }
    return out;
}

}  // namespace pathlt
