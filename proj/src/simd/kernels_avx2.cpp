// AVX2/FMA kernel variants. This translation unit is compiled with
// -mavx2 -mfma; it must only be entered after a runtime cpuid check.
#include "pabeam/simd/kernels.hpp"

#ifdef __AVX2__

#include <immintrin.h>

namespace pabeam::simd {
namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d sh = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

double sum_avx2(const double* x, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(x + i));
        acc1 = _mm256_add_pd(acc1, _mm256_loadu_pd(x + i + 4));
    }
    for (; i + 4 <= n; i += 4) acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(x + i));
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) acc += x[i];
    return acc;
}

double sumsq_avx2(const double* x, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256d a = _mm256_loadu_pd(x + i);
        __m256d b = _mm256_loadu_pd(x + i + 4);
        acc0 = _mm256_fmadd_pd(a, a, acc0);
        acc1 = _mm256_fmadd_pd(b, b, acc1);
    }
    for (; i + 4 <= n; i += 4) {
        __m256d a = _mm256_loadu_pd(x + i);
        acc0 = _mm256_fmadd_pd(a, a, acc0);
    }
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) acc += x[i] * x[i];
    return acc;
}

double dot_avx2(const double* x, const double* y, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4)
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) acc += x[i] * y[i];
    return acc;
}

void accum_lag_products_avx2(const double* x, const double* y, std::size_t n,
                             std::size_t max_lag, double* c, std::size_t ldc) {
    for (std::size_t d = 0; d < max_lag; ++d) {
        double* row = c + d * ldc;
        const double* yd = y + d;
        const std::size_t m_end = n - d;
        std::size_t m = 0;
        for (; m + 4 <= m_end; m += 4) {
            __m256d acc = _mm256_loadu_pd(row + m);
            acc = _mm256_fmadd_pd(_mm256_loadu_pd(x + m), _mm256_loadu_pd(yd + m), acc);
            _mm256_storeu_pd(row + m, acc);
        }
        for (; m < m_end; ++m) row[m] += x[m] * yd[m];
    }
}

// Interleaved complex dots: each 256-bit vector holds two complex doubles.
// re += ar*br + ai*bi ; im += ai*br - ar*bi        (conjugated, a * conj(b))
// re += ar*br - ai*bi ; im += ar*bi + ai*br        (plain, a * b)
std::complex<double> cdotc_avx2(const std::complex<double>* a, const std::complex<double>* b,
                                std::size_t n) {
    const double* pa = reinterpret_cast<const double*>(a);
    const double* pb = reinterpret_cast<const double*>(b);
    const __m256d sign = _mm256_setr_pd(0.0, -0.0, 0.0, -0.0);
    __m256d acc_re = _mm256_setzero_pd();
    __m256d acc_im = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d va = _mm256_loadu_pd(pa + 2 * i);
        const __m256d vb = _mm256_loadu_pd(pb + 2 * i);
        acc_re = _mm256_fmadd_pd(va, vb, acc_re);              // ar*br, ai*bi lanes
        const __m256d va_sw = _mm256_permute_pd(va, 0b0101);   // ai, ar, ...
        const __m256d vb_sg = _mm256_xor_pd(vb, sign);         // br, -bi, ...
        acc_im = _mm256_fmadd_pd(va_sw, vb_sg, acc_im);        // ai*br, -ar*bi lanes
    }
    double re = hsum(acc_re);
    double im = hsum(acc_im);
    for (; i < n; ++i) {
        re += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
        im += a[i].imag() * b[i].real() - a[i].real() * b[i].imag();
    }
    return {re, im};
}

std::complex<double> cdotu_avx2(const std::complex<double>* a, const std::complex<double>* b,
                                std::size_t n) {
    const double* pa = reinterpret_cast<const double*>(a);
    const double* pb = reinterpret_cast<const double*>(b);
    const __m256d sign = _mm256_setr_pd(0.0, -0.0, 0.0, -0.0);
    __m256d acc_re = _mm256_setzero_pd();
    __m256d acc_im = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d va = _mm256_loadu_pd(pa + 2 * i);
        const __m256d vb = _mm256_loadu_pd(pb + 2 * i);
        const __m256d va_sg = _mm256_xor_pd(va, sign);         // ar, -ai, ...
        acc_re = _mm256_fmadd_pd(va_sg, vb, acc_re);           // ar*br, -ai*bi lanes
        const __m256d va_sw = _mm256_permute_pd(va, 0b0101);   // ai, ar, ...
        acc_im = _mm256_fmadd_pd(va_sw, vb, acc_im);           // ai*br, ar*bi lanes
    }
    double re = hsum(acc_re);
    double im = hsum(acc_im);
    for (; i < n; ++i) {
        re += a[i].real() * b[i].real() - a[i].imag() * b[i].imag();
        im += a[i].real() * b[i].imag() + a[i].imag() * b[i].real();
    }
    return {re, im};
}

}  // namespace

const Kernels& avx2_kernels() {
    static const Kernels k = {
        "avx2",
        sum_avx2,
        sumsq_avx2,
        dot_avx2,
        accum_lag_products_avx2,
        cdotc_avx2,
        cdotu_avx2,
    };
    return k;
}

}  // namespace pabeam::simd

#endif  // __AVX2__
