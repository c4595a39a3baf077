// Runtime-dispatched arithmetic kernels. Scalar versions are the reference;
// AVX2 versions must agree with them to floating-point reassociation error
// (see tests/test_simd.cpp).
#pragma once

#include <complex>
#include <cstddef>

namespace pabeam::simd {

struct Kernels {
    const char* name;
    // sum of x[0..n)
    double (*sum)(const double* x, std::size_t n);
    // sum of x[i]^2
    double (*sumsq)(const double* x, std::size_t n);
    // dot product of x and y
    double (*dot)(const double* x, const double* y, std::size_t n);
    // c[d*ldc + m] += x[m] * y[m + d]  for d in [0, max_lag), m in [0, n - d)
    void (*accum_lag_products)(const double* x, const double* y, std::size_t n,
                               std::size_t max_lag, double* c, std::size_t ldc);
    // sum of a[i] * conj(b[i]) over interleaved complex arrays
    std::complex<double> (*cdotc)(const std::complex<double>* a, const std::complex<double>* b,
                                  std::size_t n);
    // sum of a[i] * b[i] (no conjugation)
    std::complex<double> (*cdotu)(const std::complex<double>* a, const std::complex<double>* b,
                                  std::size_t n);
};

enum class Backend { scalar, avx2 };

bool backend_available(Backend b);
// The kernel set for a specific backend; throws if unavailable on this host.
const Kernels& kernels(Backend b);
// The active kernel set (runtime-selected at startup, override with
// set_backend() or the PABEAM_SIMD=scalar|avx2 environment variable).
const Kernels& kernels();
Backend active_backend();
void set_backend(Backend b);

}  // namespace pabeam::simd
