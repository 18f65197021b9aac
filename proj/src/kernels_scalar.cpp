#include <cmath>

#include "dprls/kernels.hpp"

namespace dprls::kernels {
namespace {

double dot_scalar(const double* x, const double* y, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
    return s;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void matvec_scalar(const double* a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double xj = x[j];
        const double* col = a + j * n;
        for (std::size_t i = 0; i < n; ++i) y[i] += col[i] * xj;
    }
}

void rank1_scalar(double* p, double a, const double* v, std::size_t n) {
    for (std::size_t j = 0; j < n; ++j) {
        const double s = a * v[j];
        double* col = p + j * n;
        for (std::size_t i = 0; i < n; ++i) col[i] -= s * v[i];
    }
}

double l1_scalar(const double* x, const double* y, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += std::fabs(x[i] - y[i]);
    return s;
}

double sumsq_scalar(const double* x, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i] * x[i];
    return s;
}

}  // namespace

const KernelTable& scalar_table() {
    static const KernelTable table{Isa::scalar, dot_scalar,  axpy_scalar, matvec_scalar,
                                   rank1_scalar, l1_scalar, sumsq_scalar};
    return table;
}

}  // namespace dprls::kernels
