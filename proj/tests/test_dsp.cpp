#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "pabeam/dsp.hpp"

using namespace pabeam;

namespace {

BeamformedImage column_image(const std::vector<double>& col) {
    BeamformedImage img;
    img.grid = make_grid(0.0, 0.1e-3, 1e-3, 1e-3, 1e-3 + (col.size() - 1) * 0.05e-3, 0.05e-3);
    img.stage = BeamformedImage::Stage::rf;
    img.method = "DAS";
    img.values = col;
    REQUIRE(img.grid.n_lateral() == 1);
    REQUIRE(img.grid.n_axial() == col.size());
    return img;
}

// Brute-force DFT oracle.
std::vector<std::complex<double>> naive_dft(const std::vector<std::complex<double>>& x,
                                            bool inverse) {
    const std::size_t n = x.size();
    std::vector<std::complex<double>> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::complex<double> acc{0.0, 0.0};
        for (std::size_t j = 0; j < n; ++j) {
            const double ph = (inverse ? 2.0 : -2.0) * std::numbers::pi *
                              static_cast<double>(k * j % n) / static_cast<double>(n);
            acc += x[j] * std::complex<double>(std::cos(ph), std::sin(ph));
        }
        if (inverse) acc /= static_cast<double>(n);
        out[k] = acc;
    }
    return out;
}

}  // namespace

TEST_CASE("fft matches a naive DFT") {
    std::mt19937_64 rng(12);
    std::normal_distribution<double> g(0.0, 1.0);
    for (std::size_t n : {2ul, 8ul, 64ul, 256ul}) {
        std::vector<std::complex<double>> x(n);
        for (auto& v : x) v = {g(rng), g(rng)};
        auto fast = x;
        fft_radix2(fast, false);
        const auto ref = naive_dft(x, false);
        for (std::size_t i = 0; i < n; ++i)
            CHECK(std::abs(fast[i] - ref[i]) <= 1e-9 * std::max(1.0, std::abs(ref[i])));

        auto round = fast;
        fft_radix2(round, true);
        for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(round[i] - x[i]) <= 1e-10);
    }
    std::vector<std::complex<double>> bad(3);
    CHECK_THROWS(fft_radix2(bad, false));
}

TEST_CASE("envelope of zero column is zero") {
    const auto img = column_image(std::vector<double>(100, 0.0));
    const auto env = envelope(img);
    CHECK(env.stage == BeamformedImage::Stage::envelope);
    for (double v : env.values) CHECK(v == 0.0);
}

TEST_CASE("envelope of a tone is flat in the interior") {
    const std::size_t n = 2000;
    const double fs = 50e6, f0 = 7e6;
    std::vector<double> col(n);
    for (std::size_t i = 0; i < n; ++i)
        col[i] = std::cos(2.0 * std::numbers::pi * f0 * static_cast<double>(i) / fs);
    const auto env = envelope(column_image(col));
    for (std::size_t i = n / 10; i < n - n / 10; ++i) {
        CHECK(env.values[i] >= 0.99);
        CHECK(env.values[i] <= 1.01);
    }
}

TEST_CASE("envelope scales with |A|") {
    const std::size_t n = 512;
    std::vector<double> col(n);
    for (std::size_t i = 0; i < n; ++i)
        col[i] = std::cos(2.0 * std::numbers::pi * 0.11 * static_cast<double>(i));
    const auto base = envelope(column_image(col));

    for (double a : {2.0, -0.5}) {  // powers of two scale bit-exactly
        auto scaled_col = col;
        for (double& v : scaled_col) v *= a;
        const auto scaled = envelope(column_image(scaled_col));
        for (std::size_t i = 0; i < n; ++i)
            CHECK(scaled.values[i] == std::abs(a) * base.values[i]);
    }
    {
        auto scaled_col = col;
        for (double& v : scaled_col) v *= 3.0;
        const auto scaled = envelope(column_image(scaled_col));
        for (std::size_t i = 0; i < n; ++i)
            CHECK(scaled.values[i] ==
                  doctest::Approx(3.0 * base.values[i]).epsilon(1e-12));
    }
}

TEST_CASE("envelope rejects non-rf input") {
    auto img = column_image(std::vector<double>(64, 1.0));
    img.stage = BeamformedImage::Stage::envelope;
    CHECK_THROWS(envelope(img));
}

TEST_CASE("log compression endpoints, clipping and invariance") {
    BeamformedImage env;
    env.grid = make_grid(0.0, 1e-3, 1e-3, 1e-3, 2e-3, 1e-3);  // 2 x 2
    env.stage = BeamformedImage::Stage::envelope;
    env.values = {1.0, 0.5, 1e-4, 0.0};
    REQUIRE(env.grid.n_pixels() == 4);

    const auto db = log_compress(env, DisplayParams{60.0});
    CHECK(db.stage == BeamformedImage::Stage::db);
    CHECK(db.values[0] == 0.0);
    CHECK(db.values[1] == doctest::Approx(-6.0205999133).epsilon(1e-9));
    CHECK(db.values[2] == -60.0);
    CHECK(db.values[3] == -60.0);

    // Global scaling leaves the dB image unchanged.
    auto scaled = env;
    for (double& v : scaled.values) v *= 123.456;
    const auto db2 = log_compress(scaled, DisplayParams{60.0});
    for (std::size_t i = 0; i < db.values.size(); ++i)
        CHECK(std::abs(db2.values[i] - db.values[i]) <= 1e-9);

    BeamformedImage zero = env;
    zero.values = {0.0, 0.0, 0.0, 0.0};
    CHECK_THROWS(log_compress(zero, DisplayParams{60.0}));

    BeamformedImage rf = env;
    rf.stage = BeamformedImage::Stage::rf;
    CHECK_THROWS(log_compress(rf, DisplayParams{60.0}));
}

TEST_CASE("db image max is exactly zero and bounded below") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.0, 5.0);
    BeamformedImage env;
    env.grid = make_grid(0.0, 9e-3, 1e-3, 1e-3, 5e-3, 1e-3);
    env.stage = BeamformedImage::Stage::envelope;
    env.values.resize(env.grid.n_pixels());
    for (double& v : env.values) v = u(rng);
    const auto db = log_compress(env, DisplayParams{40.0});
    double mx = -1e9, mn = 1e9;
    for (double v : db.values) {
        mx = std::max(mx, v);
        mn = std::min(mn, v);
    }
    CHECK(mx == 0.0);
    CHECK(mn >= -40.0);
}
