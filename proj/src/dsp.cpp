#include "pabeam/dsp.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "pabeam/parallel.hpp"

namespace pabeam {

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

void fft_radix2(std::vector<std::complex<double>>& data, bool inverse) {
    const std::size_t n = data.size();
    if (n == 0 || (n & (n - 1)) != 0)
        throw std::invalid_argument("fft size must be a power of two");

    // Bit-reversal permutation.
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(data[i], data[j]);
    }

    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = (inverse ? 2.0 : -2.0) * std::numbers::pi / static_cast<double>(len);
        const std::complex<double> wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t j = 0; j < len / 2; ++j) {
                const std::complex<double> u = data[i + j];
                const std::complex<double> v = data[i + j + len / 2] * w;
                data[i + j] = u + v;
                data[i + j + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
    if (inverse) {
        const double inv = 1.0 / static_cast<double>(n);
        for (auto& v : data) v *= inv;
    }
}

std::vector<std::complex<double>> analytic_signal(const double* x, std::size_t n) {
    if (n == 0) return {};
    const std::size_t nfft = next_pow2(n);
    std::vector<std::complex<double>> buf(nfft, {0.0, 0.0});
    for (std::size_t i = 0; i < n; ++i) buf[i] = {x[i], 0.0};
    fft_radix2(buf, false);
    // Keep DC and Nyquist, double the positive band, drop the negative band.
    for (std::size_t i = 1; i < nfft / 2; ++i) buf[i] *= 2.0;
    for (std::size_t i = nfft / 2 + 1; i < nfft; ++i) buf[i] = {0.0, 0.0};
    fft_radix2(buf, true);
    buf.resize(n);
    return buf;
}

BeamformedImage envelope(const BeamformedImage& image, unsigned n_threads) {
    if (image.stage != BeamformedImage::Stage::rf)
        throw std::invalid_argument("envelope expects an rf-stage image");
    BeamformedImage out;
    out.grid = image.grid;
    out.stage = BeamformedImage::Stage::envelope;
    out.method = image.method;
    out.values.assign(image.values.size(), 0.0);

    const std::size_t rows = image.grid.n_axial();
    const std::size_t cols = image.grid.n_lateral();
    parallel_for_chunks(0, cols,
        [&](std::size_t c0, std::size_t c1) {
            std::vector<double> col(rows);
            for (std::size_t c = c0; c < c1; ++c) {
                for (std::size_t r = 0; r < rows; ++r) col[r] = image.values[r * cols + c];
                const auto a = analytic_signal(col.data(), rows);
                for (std::size_t r = 0; r < rows; ++r) out.values[r * cols + c] = std::abs(a[r]);
            }
        },
        n_threads);
    return out;
}

BeamformedImage log_compress(const BeamformedImage& image, const DisplayParams& params) {
    if (image.stage != BeamformedImage::Stage::envelope)
        throw std::invalid_argument("log_compress expects an envelope-stage image");
    if (!(params.dynamic_range_db > 0.0))
        throw std::invalid_argument("dynamic_range_db must be > 0");
    double peak = 0.0;
    for (double v : image.values) peak = std::max(peak, v);
    if (!(peak > 0.0)) throw std::invalid_argument("log_compress: image has no positive values");

    BeamformedImage out;
    out.grid = image.grid;
    out.stage = BeamformedImage::Stage::db;
    out.method = image.method;
    out.values.resize(image.values.size());
    const double floor_db = -params.dynamic_range_db;
    for (std::size_t i = 0; i < image.values.size(); ++i) {
        const double v = image.values[i];
        double db = v > 0.0 ? 20.0 * std::log10(v / peak) : floor_db;
        if (db < floor_db) db = floor_db;
        if (db > 0.0) db = 0.0;
        out.values[i] = db;
    }
    return out;
}

}  // namespace pabeam
