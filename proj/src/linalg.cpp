#include "pabeam/linalg.hpp"

#include <cmath>
#include <stdexcept>

#include "pabeam/simd/kernels.hpp"

namespace pabeam {

bool spd_solve(const double* a, std::size_t n, const double* b, double* w,
               double* chol_scratch) {
    const auto& K = simd::kernels();
    double* L = chol_scratch;

    // Left-looking Cholesky; row i of L holds L[i][0..i].
    for (std::size_t j = 0; j < n; ++j) {
        const double* lj = L + j * n;
        double d = a[j * n + j] - K.dot(lj, lj, j);
        if (!(d > 0.0)) return false;
        const double ljj = std::sqrt(d);
        L[j * n + j] = ljj;
        const double inv = 1.0 / ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            const double* li = L + i * n;
            L[i * n + j] = (a[i * n + j] - K.dot(li, lj, j)) * inv;
        }
    }

    // Forward solve L y = b (y stored in w).
    for (std::size_t i = 0; i < n; ++i) {
        const double* li = L + i * n;
        w[i] = (b[i] - K.dot(li, w, i)) / li[i];
    }
    // Back solve L^T w = y.
    for (std::size_t i = n; i-- > 0;) {
        double acc = w[i];
        for (std::size_t r = i + 1; r < n; ++r) acc -= L[r * n + i] * w[r];
        w[i] = acc / L[i * n + i];
    }
    return true;
}

bool spd_solve(const std::vector<double>& a, std::size_t n, const std::vector<double>& b,
               std::vector<double>& w) {
    if (a.size() != n * n || b.size() != n)
        throw std::invalid_argument("spd_solve: dimension mismatch");
    w.assign(n, 0.0);
    std::vector<double> scratch(n * n, 0.0);
    return spd_solve(a.data(), n, b.data(), w.data(), scratch.data());
}

bool hpd_solve(const std::complex<double>* a, std::size_t n, const std::complex<double>* b,
               std::complex<double>* w, std::complex<double>* chol_scratch) {
    using cd = std::complex<double>;
    const auto& K = simd::kernels();
    cd* L = chol_scratch;

    // A = L L^H with a real positive diagonal; row i of L holds L[i][0..i].
    for (std::size_t j = 0; j < n; ++j) {
        const cd* lj = L + j * n;
        const double d = a[j * n + j].real() - K.cdotc(lj, lj, j).real();
        if (!(d > 0.0)) return false;
        const double ljj = std::sqrt(d);
        L[j * n + j] = ljj;
        const double inv = 1.0 / ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            const cd* li = L + i * n;
            L[i * n + j] = (a[i * n + j] - K.cdotc(li, lj, j)) * inv;
        }
    }

    // Forward solve L y = b.
    for (std::size_t i = 0; i < n; ++i) {
        const cd* li = L + i * n;
        w[i] = (b[i] - K.cdotu(li, w, i)) / li[i].real();
    }
    // Back solve L^H w = y.
    for (std::size_t i = n; i-- > 0;) {
        cd acc = w[i];
        for (std::size_t r = i + 1; r < n; ++r) acc -= std::conj(L[r * n + i]) * w[r];
        w[i] = acc / L[i * n + i].real();
    }
    return true;
}

bool hpd_solve(const std::vector<std::complex<double>>& a, std::size_t n,
               const std::vector<std::complex<double>>& b,
               std::vector<std::complex<double>>& w) {
    if (a.size() != n * n || b.size() != n)
        throw std::invalid_argument("hpd_solve: dimension mismatch");
    w.assign(n, {0.0, 0.0});
    std::vector<std::complex<double>> scratch(n * n, {0.0, 0.0});
    return hpd_solve(a.data(), n, b.data(), w.data(), scratch.data());
}

}  // namespace pabeam
