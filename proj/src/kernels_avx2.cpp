#include "dprls/kernels.hpp"

#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
#define DPRLS_HAVE_AVX2_PATH 1
#include <immintrin.h>
#else
#define DPRLS_HAVE_AVX2_PATH 0
#endif

namespace dprls::kernels {

#if DPRLS_HAVE_AVX2_PATH
namespace {

#define DPRLS_AVX2 __attribute__((target("avx2,fma")))

DPRLS_AVX2 inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

DPRLS_AVX2 double dot_avx2(const double* x, const double* y, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4)
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += x[i] * y[i];
    return s;
}

DPRLS_AVX2 void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    for (; i < n; ++i) y[i] += a * x[i];
}

DPRLS_AVX2 void matvec_avx2(const double* a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = 0.0;
    for (std::size_t j = 0; j < n; ++j) axpy_avx2(x[j], a + j * n, y, n);
}

DPRLS_AVX2 void rank1_avx2(double* p, double a, const double* v, std::size_t n) {
    for (std::size_t j = 0; j < n; ++j) axpy_avx2(-a * v[j], v, p + j * n, n);
}

DPRLS_AVX2 double l1_avx2(const double* x, const double* y, std::size_t n) {
    const __m256d sign = _mm256_set1_pd(-0.0);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
        acc = _mm256_add_pd(acc, _mm256_andnot_pd(sign, d));
    }
    double s = hsum(acc);
    for (; i < n; ++i) s += x[i] > y[i] ? x[i] - y[i] : y[i] - x[i];
    return s;
}

DPRLS_AVX2 double sumsq_avx2(const double* x, std::size_t n) { return dot_avx2(x, x, n); }

#undef DPRLS_AVX2

}  // namespace

const KernelTable* avx2_table() {
    static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    static const KernelTable table{Isa::avx2, dot_avx2, axpy_avx2, matvec_avx2,
                                   rank1_avx2, l1_avx2, sumsq_avx2};
    return supported ? &table : nullptr;
}

#else

const KernelTable* avx2_table() { return nullptr; }

#endif

}  // namespace dprls::kernels
