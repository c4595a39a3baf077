#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace pabeam {

// Solves A w = b for symmetric positive-definite A (n x n, row-major) via a
// Cholesky factorization. Returns false if a non-positive pivot is hit, in
// which case w is not written. chol_scratch must hold n*n doubles.
bool spd_solve(const double* a, std::size_t n, const double* b, double* w,
               double* chol_scratch);

// Convenience wrapper that allocates its own scratch.
bool spd_solve(const std::vector<double>& a, std::size_t n, const std::vector<double>& b,
               std::vector<double>& w);

// Hermitian positive-definite solve A w = b, same contract as spd_solve.
// chol_scratch must hold n*n complex doubles.
bool hpd_solve(const std::complex<double>* a, std::size_t n, const std::complex<double>* b,
               std::complex<double>* w, std::complex<double>* chol_scratch);

bool hpd_solve(const std::vector<std::complex<double>>& a, std::size_t n,
               const std::vector<std::complex<double>>& b, std::vector<std::complex<double>>& w);

}  // namespace pabeam
