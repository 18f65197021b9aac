#pragma once

// Dense double-precision inner loops used by the simulator, the RLS recursion
// and the privacy accounting. Every kernel has a portable scalar reference
// implementation; an AVX2/FMA variant is selected at runtime when the CPU
// supports it. Set DPRLS_SIMD=scalar in the environment to force the
// reference path (useful when comparing traces across machines).

#include <cstddef>
#include <span>
#include <string_view>

namespace dprls::kernels {

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa);

struct KernelTable {
    Isa isa;
    double (*dot)(const double* x, const double* y, std::size_t n);
    // y += a * x
    void (*axpy)(double a, const double* x, double* y, std::size_t n);
    // y = A x, A column-major n x n
    void (*matvec)(const double* a, const double* x, double* y, std::size_t n);
    // P -= a * v v^T, P column-major n x n
    void (*rank1_update)(double* p, double a, const double* v, std::size_t n);
    double (*l1_distance)(const double* x, const double* y, std::size_t n);
    double (*sum_squares)(const double* x, std::size_t n);
};

const KernelTable& scalar_table();

// Null when the build target or the running CPU lacks AVX2+FMA.
const KernelTable* avx2_table();

// Table picked once per process: DPRLS_SIMD override, else the widest
// supported ISA.
const KernelTable& active();

inline double dot(std::span<const double> x, std::span<const double> y) {
    return active().dot(x.data(), y.data(), x.size());
}

inline void axpy(double a, std::span<const double> x, std::span<double> y) {
    active().axpy(a, x.data(), y.data(), x.size());
}

inline double l1_distance(std::span<const double> x, std::span<const double> y) {
    return active().l1_distance(x.data(), y.data(), x.size());
}

inline double sum_squares(std::span<const double> x) {
    return active().sum_squares(x.data(), x.size());
}

}  // namespace dprls::kernels
