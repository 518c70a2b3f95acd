#include "pathlt/kernels.hpp"

#include <stdexcept>

#if defined(__aarch64__)
#include <arm_neon.h>

namespace pathlt::kernels::neon {
namespace {

enum Mode { kSq, kWsq, kWinc };

// Two blocks per vector; lane j walks block b+j left to right.
template <int M>
double run(const double* v, const double* w, std::size_t n) {
    if (n < 2) return 0.0;
    const std::size_t cells = n - 1;
    const std::size_t nblocks = (cells + kBlock - 1) / kBlock;
    const std::size_t full = cells / kBlock;
    Kahan total;
    std::size_t b = 0;
    double lanes[2];
    for (; b + 2 <= full; b += 2) {
        const double* p0 = v + b * kBlock;
        const double* p1 = p0 + kBlock;
        const double* q0 = (M == kSq) ? nullptr : w + b * kBlock;
        const double* q1 = (M == kSq) ? nullptr : q0 + kBlock;
        float64x2_t s = vdupq_n_f64(0.0);
        float64x2_t c = vdupq_n_f64(0.0);
        for (std::size_t i = 0; i < kBlock; ++i) {
            float64x2_t x = vcombine_f64(vld1_f64(p0 + i), vld1_f64(p1 + i));
            float64x2_t y = vcombine_f64(vld1_f64(p0 + i + 1), vld1_f64(p1 + i + 1));
            float64x2_t d = vsubq_f64(y, x);
            float64x2_t term;
            if constexpr (M == kSq) {
                term = vmulq_f64(d, d);
            } else {
                float64x2_t wk = vcombine_f64(vld1_f64(q0 + i), vld1_f64(q1 + i));
                term = (M == kWsq) ? vmulq_f64(wk, vmulq_f64(d, d)) : vmulq_f64(wk, d);
            }
            float64x2_t yk = vsubq_f64(term, c);
            float64x2_t t = vaddq_f64(s, yk);
            c = vsubq_f64(vsubq_f64(t, s), yk);
            s = t;
        }
        vst1q_f64(lanes, s);
        total.add(lanes[0]);
        total.add(lanes[1]);
    }
    for (; b < nblocks; ++b) {
        std::size_t lo = b * kBlock;
        std::size_t hi = lo + kBlock < cells ? lo + kBlock : cells;
        if constexpr (M == kSq) {
            total.add(scalar::block_sq(v, lo, hi));
        } else if constexpr (M == kWsq) {
            total.add(scalar::block_wsq(v, w, lo, hi));
        } else {
            total.add(scalar::block_winc(v, w, lo, hi));
        }
    }
    return total.sum;
}

}  // namespace

double sq_increment_sum(const double* v, std::size_t n) { return run<kSq>(v, nullptr, n); }
double weighted_sq_increment_sum(const double* v, const double* w, std::size_t n) {
    return run<kWsq>(v, w, n);
}
double weighted_increment_sum(const double* v, const double* w, std::size_t n) {
    return run<kWinc>(v, w, n);
}

}  // namespace pathlt::kernels::neon

#else

namespace pathlt::kernels::neon {
double sq_increment_sum(const double*, std::size_t) { throw std::runtime_error("neon not built"); }
double weighted_sq_increment_sum(const double*, const double*, std::size_t) {
    throw std::runtime_error("neon not built");
}
double weighted_increment_sum(const double*, const double*, std::size_t) {
    throw std::runtime_error("neon not built");
}
}  // namespace pathlt::kernels::neon

#endif
