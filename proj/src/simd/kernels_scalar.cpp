#include "pabeam/simd/kernels.hpp"

namespace pabeam::simd {
namespace {

double sum_scalar(const double* x, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i];
    return acc;
}

double sumsq_scalar(const double* x, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i] * x[i];
    return acc;
}

double dot_scalar(const double* x, const double* y, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
    return acc;
}

void accum_lag_products_scalar(const double* x, const double* y, std::size_t n,
                               std::size_t max_lag, double* c, std::size_t ldc) {
    for (std::size_t d = 0; d < max_lag; ++d) {
        double* row = c + d * ldc;
        const double* yd = y + d;
        const std::size_t m_end = n - d;
        for (std::size_t m = 0; m < m_end; ++m) row[m] += x[m] * yd[m];
    }
}

std::complex<double> cdotc_scalar(const std::complex<double>* a, const std::complex<double>* b,
                                  std::size_t n) {
    double re = 0.0, im = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        re += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
        im += a[i].imag() * b[i].real() - a[i].real() * b[i].imag();
    }
    return {re, im};
}

std::complex<double> cdotu_scalar(const std::complex<double>* a, const std::complex<double>* b,
                                  std::size_t n) {
    double re = 0.0, im = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        re += a[i].real() * b[i].real() - a[i].imag() * b[i].imag();
        im += a[i].real() * b[i].imag() + a[i].imag() * b[i].real();
    }
    return {re, im};
}

}  // namespace

const Kernels& scalar_kernels() {
    static const Kernels k = {
        "scalar",
        sum_scalar,
        sumsq_scalar,
        dot_scalar,
        accum_lag_products_scalar,
        cdotc_scalar,
        cdotu_scalar,
    };
    return k;
}

}  // namespace pabeam::simd
