#pragma once

#include <cstddef>
#include <string>

// Hot loops over partition increments. Every variant produces the same
// bits: cells are cut into blocks of kBlock, each block is summed left to
// right with Kahan compensation, and block sums are combined in order.
namespace pathlt::kernels {

constexpr std::size_t kBlock = 1024;

enum class Isa { scalar, avx2, neon };

Isa active_isa();
void force_isa(Isa isa);  // tests only; throws if the ISA is unavailable
bool isa_available(Isa isa);
std::string isa_name(Isa isa);

struct Kahan {
    double sum = 0.0;
    double comp = 0.0;
    void add(double x) {
        double y = x - comp;
        double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
};

// v has n values (n-1 cells). Returns sum of (v[i+1]-v[i])^2.
double sq_increment_sum(const double* v, std::size_t n);
// w has n-1 weights. Returns sum of w[i]*(v[i+1]-v[i])^2.
double weighted_sq_increment_sum(const double* v, const double* w, std::size_t n);
// Returns sum of w[i]*(v[i+1]-v[i]).
double weighted_increment_sum(const double* v, const double* w, std::size_t n);

namespace scalar {
double sq_increment_sum(const double* v, std::size_t n);
double weighted_sq_increment_sum(const double* v, const double* w, std::size_t n);
double weighted_increment_sum(const double* v, const double* w, std::size_t n);
// One block of cells [lo, hi); used for the tails of vector variants.
double block_sq(const double* v, std::size_t lo, std::size_t hi);
double block_wsq(const double* v, const double* w, std::size_t lo, std::size_t hi);
double block_winc(const double* v, const double* w, std::size_t lo, std::size_t hi);
}  // namespace scalar

namespace avx2 {
double sq_increment_sum(const double* v, std::size_t n);
double weighted_sq_increment_sum(const double* v, const double* w, std::size_t n);
double weighted_increment_sum(const double* v, const double* w, std::size_t n);
}  // namespace avx2

namespace neon {
double sq_increment_sum(const double* v, std::size_t n);
double weighted_sq_increment_sum(const double* v, const double* w, std::size_t n);
double weighted_increment_sum(const double* v, const double* w, std::size_t n);
}  // namespace neon

}  // namespace pathlt::kernels
