#include "pathlt/kernels.hpp"

#include <stdexcept>

#if defined(__x86_64__) || defined(__i386__)
#include <immintrin.h>

#define PATHLT_AVX2 __attribute__((target("avx2")))

namespace pathlt::kernels::avx2 {
namespace {

enum Mode { kSq, kWsq, kWinc };

// Rows hold 4 consecutive samples of 4 blocks; columns come out as lanes.
PATHLT_AVX2 inline void transpose4(__m256d& r0, __m256d& r1, __m256d& r2, __m256d& r3) {
    __m256d t0 = _mm256_unpacklo_pd(r0, r1);
    __m256d t1 = _mm256_unpackhi_pd(r0, r1);
    __m256d t2 = _mm256_unpacklo_pd(r2, r3);
    __m256d t3 = _mm256_unpackhi_pd(r2, r3);
    r0 = _mm256_permute2f128_pd(t0, t2, 0x20);
    r1 = _mm256_permute2f128_pd(t1, t3, 0x20);
    r2 = _mm256_permute2f128_pd(t0, t2, 0x31);
    r3 = _mm256_permute2f128_pd(t1, t3, 0x31);
}

template <int M>
PATHLT_AVX2 double run(const double* v, const double* w, std::size_t n) {
    if (n < 2) return 0.0;
    const std::size_t cells = n - 1;
    const std::size_t nblocks = (cells + kBlock - 1) / kBlock;
    const std::size_t full = cells / kBlock;
    Kahan total;
    std::size_t b = 0;
    alignas(32) double lanes[4];
    for (; b + 4 <= full; b += 4) {
        const double* p[4];
        const double* q[4];
        for (int j = 0; j < 4; ++j) {
            p[j] = v + (b + j) * kBlock;
            q[j] = (M == kSq) ? nullptr : w + (b + j) * kBlock;
        }
        __m256d s = _mm256_setzero_pd();
        __m256d c = _mm256_setzero_pd();
        for (std::size_t i = 0; i < kBlock; i += 4) {
            __m256d x0 = _mm256_loadu_pd(p[0] + i), x1 = _mm256_loadu_pd(p[1] + i);
            __m256d x2 = _mm256_loadu_pd(p[2] + i), x3 = _mm256_loadu_pd(p[3] + i);
            __m256d y0 = _mm256_loadu_pd(p[0] + i + 1), y1 = _mm256_loadu_pd(p[1] + i + 1);
            __m256d y2 = _mm256_loadu_pd(p[2] + i + 1), y3 = _mm256_loadu_pd(p[3] + i + 1);
            transpose4(x0, x1, x2, x3);
            transpose4(y0, y1, y2, y3);
            __m256d w0 = _mm256_setzero_pd(), w1 = w0, w2 = w0, w3 = w0;
            if constexpr (M != kSq) {
                w0 = _mm256_loadu_pd(q[0] + i);
                w1 = _mm256_loadu_pd(q[1] + i);
                w2 = _mm256_loadu_pd(q[2] + i);
                w3 = _mm256_loadu_pd(q[3] + i);
                transpose4(w0, w1, w2, w3);
            }
            const __m256d xs[4] = {x0, x1, x2, x3};
            const __m256d ys[4] = {y0, y1, y2, y3};
            const __m256d ws[4] = {w0, w1, w2, w3};
            for (int k = 0; k < 4; ++k) {
                __m256d d = _mm256_sub_pd(ys[k], xs[k]);
                __m256d term;
                if constexpr (M == kSq) {
                    term = _mm256_mul_pd(d, d);
                } else if constexpr (M == kWsq) {
                    term = _mm256_mul_pd(ws[k], _mm256_mul_pd(d, d));
                } else {
                    term = _mm256_mul_pd(ws[k], d);
                }
                __m256d yk = _mm256_sub_pd(term, c);
                __m256d t = _mm256_add_pd(s, yk);
                c = _mm256_sub_pd(_mm256_sub_pd(t, s), yk);
                s = t;
            }
        }
        _mm256_store_pd(lanes, s);
        for (int j = 0; j < 4; ++j) total.add(lanes[j]);
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

}  // namespace pathlt::kernels::avx2

#else

namespace pathlt::kernels::avx2 {
double sq_increment_sum(const double*, std::size_t) { throw std::runtime_error("avx2 not built"); }
double weighted_sq_increment_sum(const double*, const double*, std::size_t) {
    throw std::runtime_error("avx2 not built");
}
double weighted_increment_sum(const double*, const double*, std::size_t) {
    throw std::runtime_error("avx2 not built");
}
}  // namespace pathlt::kernels::avx2

#endif
