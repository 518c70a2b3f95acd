#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace pathlt {

using json = nlohmann::json;

struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

struct UnsupportedError : std::logic_error {
    using std::logic_error::logic_error;
};

struct Extremes {
    double min = 0.0;
    double max = 0.0;
};

// Result of a two-level search: which = 0 for the lower level, 1 for the upper.
struct Hit {
    double time = 0.0;
    int which = 0;
};

// Strictly increasing continuous bijection of [0, T].
struct TimeMap {
    enum class Kind { identity, power, poly };
    Kind kind = Kind::identity;
    double horizon = 1.0;
    double exponent = 1.0;        // power: T (t/T)^p
    std::vector<double> weights;  // poly: T sum_k w_k (t/T)^k, k >= 1, w >= 0, sum w = 1

    static TimeMap identity(double horizon = 1.0);
    static TimeMap power(double p, double horizon = 1.0);
    static TimeMap poly(std::vector<double> w, double horizon = 1.0);

    double operator()(double t) const;
    double inverse(double s) const;
    json to_json() const;
    static TimeMap from_json(const json& j);
};

// C^1 strictly monotone map of values.
struct ValueMap {
    enum class Kind { affine, exp, logistic };
    Kind kind = Kind::affine;
    double a = 1.0;  // affine slope / exp and logistic rate
    double b = 0.0;  // affine intercept / logistic centre

    static ValueMap affine(double a, double b);
    static ValueMap exp(double rate = 1.0);
    static ValueMap logistic(double rate = 1.0, double centre = 0.0);

    double operator()(double u) const;
    double d1(double u) const;
    double d2(double u) const;
    double inverse(double y) const;  // NaN when y is outside the range
    bool increasing() const;
    json to_json() const;
    static ValueMap from_json(const json& j);
};

class PathImpl {
public:
    virtual ~PathImpl() = default;
    virtual double horizon() const = 0;
    virtual std::string kind() const = 0;
    virtual bool analytic() const { return true; }
    virtual double eval(double t) const = 0;
    virtual void eval_many(const double* t, std::size_t n, double* out) const;
    virtual Extremes extremes(double s, double t) const = 0;
    // Earliest time >= from at which lo or hi is attained (lo <= hi).
    virtual std::optional<Hit> first_hit_any(double lo, double hi, double from) const = 0;
    virtual void refine_to(double s, double t, int depth) const;
    virtual std::vector<double> dyadic_values(int n) const;
    // Interior times in (s, t) where the path turns, when the path is piecewise
    // monotone with finitely many pieces there.
    virtual std::optional<std::vector<double>> turning_points(double s, double t) const;
    // Values at k 2^-n T for k0 <= k <= k1.
    virtual std::vector<double> window_values(int n, std::uint64_t k0, std::uint64_t k1) const;
    virtual json spec() const = 0;
};

class Path {
public:
    Path() = default;
    explicit Path(std::shared_ptr<const PathImpl> impl) : impl_(std::move(impl)) {}

    double horizon() const { return impl_->horizon(); }
    std::string kind() const { return impl_->kind(); }
    bool analytic() const { return impl_->analytic(); }
    const PathImpl& impl() const { return *impl_; }
    std::shared_ptr<const PathImpl> shared() const { return impl_; }

    double eval(double t) const;
    std::vector<double> eval_many(const std::vector<double>& times) const;
    Extremes extremes(double s, double t) const;
    std::optional<double> first_hit(double level, double from, double tol = -1.0) const;
    std::optional<Hit> first_hit_any(double lo, double hi, double from, double tol = -1.0) const;
    void refine_to(double s, double t, int depth) const;
    // Values at k 2^-n T for k = 0..2^n (the horizon must be covered exactly).
    std::vector<double> dyadic_values(int n) const;
    std::vector<double> window_values(int n, std::uint64_t k0, std::uint64_t k1) const;
    std::optional<std::vector<double>> turning_points(double s, double t) const { return impl_->turning_points(s, t); }
    double default_tol() const { return std::ldexp(horizon(), -40); }

    json to_json() const { return impl_->spec(); }
    static Path from_json(const json& j);

private:
    std::shared_ptr<const PathImpl> impl_;
};

// Analytic paths.
Path zigzag();                                         // 0 -> 1 -> 0 on [0,1]
Path constant(double c, double horizon = 1.0);
Path linear(double slope = 1.0, double intercept = 0.0, double horizon = 1.0);
Path piecewise_linear(std::vector<double> t, std::vector<double> x);
Path cantor_path();                                    // sqrt(2 dist(t, C)) on [0,1]

// Brownian bridge tree. base_depth is materialized eagerly; resolution is the
// depth of the piecewise-linear realization.
struct BridgeOptions {
    double horizon = 1.0;
    int base_depth = 12;
    int resolution = 40;
};
Path bridge(std::uint64_t seed, BridgeOptions opt = {});
// Bridge plus the integral of a polynomial drift rate sum_k c_k t^k.
Path drifted(std::uint64_t seed, std::vector<double> drift_rate, BridgeOptions opt = {});

Path time_changed(const Path& inner, const TimeMap& tau);
Path mapped(const Path& inner, const ValueMap& phi);

// Cantor helpers shared with the constructions module.
double cantor_distance(double t);
double cantor_function_value(double t);

// Compact textual specs used by the command line: "zigzag", "constant:3",
// "linear[:slope[,intercept]]", "cantor", "bridge:SEED[:RES]",
// "drifted:SEED:c0[,c1...]", "pl:t0,x0;t1,x1;...".
Path parse_path(const std::string& text);

}  // namespace pathlt
