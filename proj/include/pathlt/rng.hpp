#pragma once

#include <cstdint>

namespace pathlt {

// Stateless mixing (SplitMix64 finalizer).
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Counter-based key for dyadic node (k, m) of the tree owned by `seed`.
inline std::uint64_t node_key(std::uint64_t seed, std::uint64_t k, std::uint32_t m) {
    std::uint64_t h = mix64(seed ^ 0x5851f42d4c957f2dULL);
    h = mix64(h ^ (static_cast<std::uint64_t>(m) * 0xd6e8feb86659fd93ULL));
    return mix64(h ^ k);
}

// Uniform on the open interval (0,1) from the top 53 bits.
inline double open_uniform(std::uint64_t bits) {
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

// Inverse standard normal CDF (Wichura AS241, PPND16).
double normal_quantile(double p);

// Standard normal variate attached to a tree node.
inline double node_normal(std::uint64_t seed, std::uint64_t k, std::uint32_t m) {
    return normal_quantile(open_uniform(node_key(seed, k, m)));
}

// Sequential generator for code that just needs a reproducible stream.
class SplitMix {
public:
    explicit SplitMix(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    double uniform() { return open_uniform(next()); }
    double uniform(double a, double b) { return a + (b - a) * uniform(); }
    double normal() { return normal_quantile(uniform()); }
    // integer in [lo, hi]
    long long range(long long lo, long long hi) {
        auto span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<long long>(next() % span);
    }

private:
    std::uint64_t state_;
};

}  // namespace pathlt
