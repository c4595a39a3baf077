// Display chain: per-column analytic-signal envelope and log compression.
#pragma once

#include <complex>
#include <vector>

#include "pabeam/beamform.hpp"

namespace pabeam {

struct DisplayParams {
    double dynamic_range_db = 60.0;
};

// In-place radix-2 FFT; size must be a power of two.
void fft_radix2(std::vector<std::complex<double>>& data, bool inverse);
std::size_t next_pow2(std::size_t n);

// Analytic signal of x via the frequency-domain Hilbert construction,
// zero-padded to the next power of two.
std::vector<std::complex<double>> analytic_signal(const double* x, std::size_t n);

// Envelope along the axial direction of every image column. Input must be at
// the rf stage.
BeamformedImage envelope(const BeamformedImage& image, unsigned n_threads = 0);

// 20*log10(envelope / max), clipped to [-dynamic_range_db, 0]. Input must be
// at the envelope stage with a positive maximum.
BeamformedImage log_compress(const BeamformedImage& image, const DisplayParams& params);

}  // namespace pabeam
