#include <doctest.h>

#include <cmath>
#include <vector>

#include "pabeam/metrics.hpp"

using namespace pabeam;

namespace {

BeamformedImage db_image(const ImagingGrid& grid, const std::vector<double>& values) {
    BeamformedImage img;
    img.grid = grid;
    img.stage = BeamformedImage::Stage::db;
    img.method = "DAS";
    img.values = values;
    return img;
}

LateralProfile profile_from(const std::vector<double>& lateral_m,
                            const std::vector<double>& db) {
    LateralProfile p;
    p.depth = 10e-3;
    p.lateral = lateral_m;
    p.values_db = db;
    return p;
}

}  // namespace

TEST_CASE("extract_profile renormalizes the row and rejects depths off-grid") {
    const auto grid = make_grid(-1e-3, 1e-3, 0.5e-3, 10e-3, 12e-3, 1e-3);
    REQUIRE(grid.n_lateral() == 5);
    REQUIRE(grid.n_axial() == 3);
    std::vector<double> v(grid.n_pixels(), -60.0);
    v[grid.pixel_index(1, 2)] = -10.0;  // single hot pixel in row 1
    const auto img = db_image(grid, v);

    const auto prof = extract_profile(img, 11e-3);
    CHECK(prof.depth == doctest::Approx(11e-3));
    CHECK(prof.values_db[2] == 0.0);
    for (std::size_t i = 0; i < 5; ++i)
        if (i != 2) CHECK(prof.values_db[i] == doctest::Approx(-50.0));

    // Adding a constant to the row leaves the profile unchanged.
    auto v2 = v;
    for (std::size_t c = 0; c < 5; ++c) v2[grid.pixel_index(1, c)] += 7.5;
    const auto prof2 = extract_profile(db_image(grid, v2), 11e-3);
    for (std::size_t i = 0; i < 5; ++i)
        CHECK(prof2.values_db[i] == doctest::Approx(prof.values_db[i]).epsilon(1e-12));

    CHECK_THROWS(extract_profile(img, 50e-3));
}

TEST_CASE("fwhm: triangular profile crosses -6 dB at +-60 um") {
    // Slope 1 dB per 10 um around a 0 dB apex.
    std::vector<double> lat, db;
    for (int i = -20; i <= 20; ++i) {
        lat.push_back(i * 10e-6);
        db.push_back(-std::abs(i) * 1.0);
    }
    const auto w = fwhm_minus6db(profile_from(lat, db));
    REQUIRE(w.has_value());
    CHECK(*w == doctest::Approx(120.0).epsilon(1e-9));
}

TEST_CASE("fwhm: gaussian amplitude profile matches the closed form") {
    const double sigma = 100e-6;
    const double step = 50e-6;
    std::vector<double> lat, db;
    for (int i = -40; i <= 40; ++i) {
        const double x = i * step;
        lat.push_back(x);
        db.push_back(20.0 * std::log10(std::exp(-x * x / (2.0 * sigma * sigma))));
    }
    const auto w = fwhm_minus6db(profile_from(lat, db));
    REQUIRE(w.has_value());
    const double expected = 2.0 * sigma * std::sqrt(2.0 * std::log(2.0)) * 1e6;  // um
    CHECK(std::abs(*w - expected) <= step * 1e6);
}

TEST_CASE("fwhm undefined cases") {
    // Plateau at 0 dB: no unique peak.
    std::vector<double> lat, db;
    for (int i = 0; i < 21; ++i) {
        lat.push_back(i * 10e-6);
        db.push_back(0.0);
    }
    CHECK_FALSE(fwhm_minus6db(profile_from(lat, db)).has_value());

    // Peak hugging the edge.
    std::vector<double> lat2, db2;
    for (int i = 0; i < 21; ++i) {
        lat2.push_back(i * 10e-6);
        db2.push_back(-1.0 * i);
    }
    CHECK_FALSE(fwhm_minus6db(profile_from(lat2, db2)).has_value());

    // No crossing on one side within the grid.
    std::vector<double> lat3, db3;
    for (int i = -5; i <= 5; ++i) {
        lat3.push_back(i * 10e-6);
        db3.push_back(-std::abs(i) * 0.5);  // only reaches -2.5 dB
    }
    CHECK_FALSE(fwhm_minus6db(profile_from(lat3, db3)).has_value());
}

TEST_CASE("snr: direct substitution and scale invariance") {
    const auto grid = make_grid(-5e-3, 5e-3, 0.5e-3, 10e-3, 20e-3, 0.5e-3);
    BeamformedImage env;
    env.grid = grid;
    env.stage = BeamformedImage::Stage::envelope;
    env.values.assign(grid.n_pixels(), 0.0);

    // Alternating background 0.0/0.02 -> mean 0.01, std 0.01.
    const RectROI bg{2e-3, 4e-3, 12e-3, 18e-3};
    for (std::size_t r = 0; r < grid.n_axial(); ++r)
        for (std::size_t c = 0; c < grid.n_lateral(); ++c)
            if (bg.contains(grid.lateral[c], grid.axial[r]))
                env.values[grid.pixel_index(r, c)] = ((r + c) % 2 == 0) ? 0.0 : 0.02;

    const RectROI target{-3e-3, -1e-3, 12e-3, 18e-3};
    const std::size_t peak_px = grid.pixel_index(grid.nearest_row(15e-3), 5);
    env.values[peak_px] = 1.0;

    auto s = snr(env, target, bg);
    REQUIRE(s.has_value());
    CHECK(*s == doctest::Approx(40.0).epsilon(1e-6));

    auto scaled = env;
    for (double& v : scaled.values) v *= 17.0;
    const auto s2 = snr(scaled, target, bg);
    REQUIRE(s2.has_value());
    CHECK(*s2 == doctest::Approx(*s).epsilon(1e-12));

    // Zero background variability -> undefined.
    auto flat = env;
    for (std::size_t r = 0; r < grid.n_axial(); ++r)
        for (std::size_t c = 0; c < grid.n_lateral(); ++c)
            if (bg.contains(grid.lateral[c], grid.axial[r]))
                flat.values[grid.pixel_index(r, c)] = 0.5;
    CHECK_FALSE(snr(flat, target, bg).has_value());

    CHECK_THROWS(snr(env, target, RectROI{-3e-3, 2.5e-3, 12e-3, 18e-3}));  // overlap
}

TEST_CASE("contrast ratio: hand values and disjointness") {
    const auto grid = make_grid(-8e-3, 8e-3, 0.25e-3, 12e-3, 28e-3, 0.25e-3);
    BeamformedImage env;
    env.grid = grid;
    env.stage = BeamformedImage::Stage::envelope;
    env.values.assign(grid.n_pixels(), 0.0);

    const DiskROI inside{0.0, 20e-3, 3e-3};
    AnnulusROI outside;
    outside.lateral = 0.0;
    outside.axial = 20e-3;
    outside.inner_radius = 5e-3;
    outside.outer_radius = 6.4e-3;

    for (std::size_t r = 0; r < grid.n_axial(); ++r)
        for (std::size_t c = 0; c < grid.n_lateral(); ++c) {
            const double x = grid.lateral[c], z = grid.axial[r];
            if (inside.contains(x, z)) env.values[grid.pixel_index(r, c)] = 10.0;
            else if (outside.contains(x, z)) env.values[grid.pixel_index(r, c)] = 1.0;
        }

    auto cr = contrast_ratio(env, inside, outside);
    REQUIRE(cr.has_value());
    CHECK(*cr == doctest::Approx(20.0).epsilon(1e-9));

    // Equal means -> 0 dB.
    auto flat = env;
    for (double& v : flat.values) v = 2.0;
    const auto cr0 = contrast_ratio(flat, inside, outside);
    REQUIRE(cr0.has_value());
    CHECK(*cr0 == doctest::Approx(0.0));

    // Exclusion disks carve pixels out of the annulus.
    AnnulusROI excl = outside;
    excl.exclusions.push_back({0.0, 26e-3, 2e-3});
    CHECK(excl.contains(0.0, 24.5e-3) == false);
    CHECK(excl.contains(5.5e-3, 20e-3) == true);

    // Overlapping ROIs are rejected.
    AnnulusROI bad = outside;
    bad.inner_radius = 2e-3;
    CHECK_THROWS(contrast_ratio(env, inside, bad));
}

TEST_CASE("sidelobe level: secondary peak and monotone profiles") {
    std::vector<double> lat, db;
    for (int i = 0; i < 41; ++i) lat.push_back(i * 50e-6);
    // Mainlobe at index 20, first minimum at +-5, secondary lobe at -30 dB.
    db.assign(41, -60.0);
    for (int i = -5; i <= 5; ++i) db[20 + i] = -8.0 * std::abs(i);
    db[10] = -30.0;
    db[30] = -35.0;
    const auto sl = sidelobe_level(profile_from(lat, db));
    REQUIRE(sl.has_value());
    CHECK(*sl == doctest::Approx(-30.0));

    // Pure single-lobe profile: no local minimum on either side.
    std::vector<double> mono(41);
    for (int i = 0; i < 41; ++i) mono[i] = -std::abs(i - 20) * 1.5;
    CHECK_FALSE(sidelobe_level(profile_from(lat, mono)).has_value());
}

TEST_CASE("metrics are invariant to global envelope scaling") {
    // FWHM and sidelobe read renormalized dB profiles; SNR and CR are ratios.
    // Scaling the envelope rescales the dB image by a constant, which the
    // profile renormalization removes.
    const auto grid = make_grid(-2e-3, 2e-3, 0.1e-3, 10e-3, 11e-3, 0.5e-3);
    BeamformedImage env;
    env.grid = grid;
    env.stage = BeamformedImage::Stage::envelope;
    env.values.assign(grid.n_pixels(), 0.0);
    for (std::size_t c = 0; c < grid.n_lateral(); ++c) {
        const double x = grid.lateral[c];
        const double val = std::exp(-x * x / (2.0 * 200e-6 * 200e-6));
        env.values[grid.pixel_index(1, c)] = val;
        env.values[grid.pixel_index(0, c)] = 0.5 * val;
        env.values[grid.pixel_index(2, c)] = 0.25 * val;
    }
    auto scaled = env;
    for (double& v : scaled.values) v *= 42.0;

    // Same dB range for both; profiles must agree after renormalization.
    BeamformedImage db1, db2;
    db1 = env;
    db2 = scaled;
    for (auto* img : {&db1, &db2}) {
        double peak = 0.0;
        for (double v : img->values) peak = std::max(peak, v);
        for (double& v : img->values)
            v = v > 0.0 ? std::max(-120.0, 20.0 * std::log10(v / peak)) : -120.0;
        img->stage = BeamformedImage::Stage::db;
    }
    const auto p1 = extract_profile(db1, 10.5e-3);
    const auto p2 = extract_profile(db2, 10.5e-3);
    const auto w1 = fwhm_minus6db(p1);
    const auto w2 = fwhm_minus6db(p2);
    REQUIRE(w1.has_value());
    REQUIRE(w2.has_value());
    CHECK(*w1 == doctest::Approx(*w2).epsilon(1e-12));
}
