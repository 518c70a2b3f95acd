#include "pathlt/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <stdexcept>

namespace pathlt::kernels {

namespace scalar {

double block_sq(const double* v, std::size_t lo, std::size_t hi) {
    Kahan k;
    for (std::size_t i = lo; i < hi; ++i) {
        double d = v[i + 1] - v[i];
        k.add(d * d);
    }
    return k.sum;
}

double block_wsq(const double* v, const double* w, std::size_t lo, std::size_t hi) {
    Kahan k;
    for (std::size_t i = lo; i < hi; ++i) {
        double d = v[i + 1] - v[i];
        k.add(w[i] * (d * d));
    }
    return k.sum;
}

double block_winc(const double* v, const double* w, std::size_t lo, std::size_t hi) {
    Kahan k;
    for (std::size_t i = lo; i < hi; ++i) {
        double d = v[i + 1] - v[i];
        k.add(w[i] * d);
    }
    return k.sum;
}

template <class F>
static double blocked(std::size_t n, F block) {
    if (n < 2) return 0.0;
    const std::size_t cells = n - 1;
    Kahan total;
    for (std::size_t lo = 0; lo < cells; lo += kBlock) {
        std::size_t hi = lo + kBlock < cells ? lo + kBlock : cells;
        total.add(block(lo, hi));
    }
    return total.sum;
}

double sq_increment_sum(const double* v, std::size_t n) {
    return blocked(n, [&](std::size_t lo, std::size_t hi) { return block_sq(v, lo, hi); });
}

double weighted_sq_increment_sum(const double* v, const double* w, std::size_t n) {
    return blocked(n, [&](std::size_t lo, std::size_t hi) { return block_wsq(v, w, lo, hi); });
}

double weighted_increment_sum(const double* v, const double* w, std::size_t n) {
    return blocked(n, [&](std::size_t lo, std::size_t hi) { return block_winc(v, w, lo, hi); });
}

}  // namespace scalar

namespace {

using SqFn = double (*)(const double*, std::size_t);
using WFn = double (*)(const double*, const double*, std::size_t);

struct Table {
    SqFn sq;
    WFn wsq;
    WFn winc;
};

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

bool cpu_has_neon() {
#if defined(__aarch64__)
    return true;
#else
    return false;
#endif
}

Table table_for(Isa isa) {
    switch (isa) {
        case Isa::avx2:
            return {avx2::sq_increment_sum, avx2::weighted_sq_increment_sum, avx2::weighted_increment_sum};
        case Isa::neon:
            return {neon::sq_increment_sum, neon::weighted_sq_increment_sum, neon::weighted_increment_sum};
        default:
            return {scalar::sq_increment_sum, scalar::weighted_sq_increment_sum,
                    scalar::weighted_increment_sum};
    }
}

Isa detect() {
    const char* env = std::getenv("PATHLT_SIMD");
    if (env && std::strcmp(env, "scalar") == 0) return Isa::scalar;
    if (cpu_has_avx2()) return Isa::avx2;
    if (cpu_has_neon()) return Isa::neon;
    return Isa::scalar;
}

std::atomic<int>& current() {
    static std::atomic<int> isa{static_cast<int>(detect())};
    return isa;
}

}  // namespace

bool isa_available(Isa isa) {
    switch (isa) {
        case Isa::scalar: return true;
        case Isa::avx2: return cpu_has_avx2();
        case Isa::neon: return cpu_has_neon();
    }
    return false;
}

Isa active_isa() { return static_cast<Isa>(current().load()); }

void force_isa(Isa isa) {
    if (!isa_available(isa)) throw std::runtime_error("ISA not available: " + isa_name(isa));
    current().store(static_cast<int>(isa));
}

std::string isa_name(Isa isa) {
    switch (isa) {
        case Isa::scalar: return "scalar";
        case Isa::avx2: return "avx2";
        case Isa::neon: return "neon";
    }
    return "?";
}

double sq_increment_sum(const double* v, std::size_t n) { return table_for(active_isa()).sq(v, n); }

double weighted_sq_increment_sum(const double* v, const double* w, std::size_t n) {
    return table_for(active_isa()).wsq(v, w, n);
}

double weighted_increment_sum(const double* v, const double* w, std::size_t n) {
    return table_for(active_isa()).winc(v, w, n);
}

}  // namespace pathlt::kernels
