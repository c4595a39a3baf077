#include "pabeam/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace pabeam {

namespace {

constexpr double kHalfWidthDb = -6.0;

std::size_t unique_peak_index(const std::vector<double>& v, bool& unique) {
    std::size_t best = 0;
    unique = true;
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (v[i] > v[best]) {
            best = i;
            unique = true;
        } else if (v[i] == v[best]) {
            unique = false;
        }
    }
    return best;
}

}  // namespace

LateralProfile extract_profile(const BeamformedImage& db_image, double depth) {
    if (db_image.stage != BeamformedImage::Stage::db)
        throw std::invalid_argument("extract_profile expects a db-stage image");
    const std::size_t row = db_image.grid.nearest_row(depth);
    const std::size_t cols = db_image.grid.n_lateral();

    LateralProfile p;
    p.depth = db_image.grid.axial[row];
    p.lateral = db_image.grid.lateral;
    p.values_db.resize(cols);
    double peak = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < cols; ++c) {
        p.values_db[c] = db_image.values[row * cols + c];
        peak = std::max(peak, p.values_db[c]);
    }
    for (double& v : p.values_db) v -= peak;
    return p;
}

std::optional<double> fwhm_minus6db(const LateralProfile& profile) {
    const auto& v = profile.values_db;
    const std::size_t n = v.size();
    if (n < 7) return std::nullopt;
    bool unique = false;
    const std::size_t peak = unique_peak_index(v, unique);
    if (!unique || peak < 3 || peak + 3 >= n) return std::nullopt;
    const double threshold = v[peak] + kHalfWidthDb;

    auto cross = [&](bool left) -> std::optional<double> {
        const long step = left ? -1 : 1;
        long prev = static_cast<long>(peak);
        for (long i = prev + step; i >= 0 && i < static_cast<long>(n); i += step) {
            if (v[i] < threshold) {
                // Linear interpolation in dB between the bracketing samples.
                const double x0 = profile.lateral[prev];
                const double x1 = profile.lateral[i];
                const double y0 = v[prev];
                const double y1 = v[i];
                return x0 + (x1 - x0) * (threshold - y0) / (y1 - y0);
            }
            prev = i;
        }
        return std::nullopt;
    };

    const auto left = cross(true);
    const auto right = cross(false);
    if (!left || !right) return std::nullopt;
    return (*right - *left) * 1e6;  // meters -> micrometers
}

std::optional<double> snr(const BeamformedImage& env_image, const RectROI& target,
                          const RectROI& background) {
    if (env_image.stage != BeamformedImage::Stage::envelope)
        throw std::invalid_argument("snr expects an envelope-stage image");
    if (target.overlaps(background)) throw std::invalid_argument("snr ROIs must be disjoint");

    const auto& g = env_image.grid;
    double peak = -std::numeric_limits<double>::infinity();
    double bg_sum = 0.0, bg_sumsq = 0.0;
    std::size_t n_target = 0, n_bg = 0;
    for (std::size_t r = 0; r < g.n_axial(); ++r) {
        for (std::size_t c = 0; c < g.n_lateral(); ++c) {
            const double x = g.lateral[c], z = g.axial[r];
            const double val = env_image.values[r * g.n_lateral() + c];
            if (target.contains(x, z)) {
                peak = std::max(peak, val);
                ++n_target;
            }
            if (background.contains(x, z)) {
                bg_sum += val;
                bg_sumsq += val * val;
                ++n_bg;
            }
        }
    }
    if (n_target == 0 || n_bg < 2) throw std::invalid_argument("snr ROI outside grid or empty");
    const double mean = bg_sum / static_cast<double>(n_bg);
    const double var = std::max(0.0, bg_sumsq / static_cast<double>(n_bg) - mean * mean);
    const double sd = std::sqrt(var);
    if (!(sd > 0.0)) return std::nullopt;
    return 20.0 * std::log10(peak / sd);
}

std::optional<double> contrast_ratio(const BeamformedImage& env_image, const DiskROI& inside,
                                     const AnnulusROI& outside) {
    if (env_image.stage != BeamformedImage::Stage::envelope)
        throw std::invalid_argument("contrast_ratio expects an envelope-stage image");

    const auto& g = env_image.grid;
    double in_sum = 0.0, out_sum = 0.0;
    std::size_t n_in = 0, n_out = 0;
    for (std::size_t r = 0; r < g.n_axial(); ++r) {
        for (std::size_t c = 0; c < g.n_lateral(); ++c) {
            const double x = g.lateral[c], z = g.axial[r];
            const double val = env_image.values[r * g.n_lateral() + c];
            const bool is_in = inside.contains(x, z);
            const bool is_out = outside.contains(x, z);
            if (is_in && is_out)
                throw std::invalid_argument("contrast_ratio ROIs must be disjoint");
            if (is_in) {
                in_sum += val;
                ++n_in;
            }
            if (is_out) {
                out_sum += val;
                ++n_out;
            }
        }
    }
    if (n_in == 0 || n_out == 0)
        throw std::invalid_argument("contrast_ratio ROI outside grid or empty");
    const double in_mean = in_sum / static_cast<double>(n_in);
    const double out_mean = out_sum / static_cast<double>(n_out);
    if (!(out_mean > 0.0)) return std::nullopt;
    return 20.0 * std::log10(in_mean / out_mean);
}

std::optional<double> sidelobe_level(const LateralProfile& profile) {
    const auto& v = profile.values_db;
    const std::size_t n = v.size();
    if (n < 3) return std::nullopt;
    bool unique = false;
    const std::size_t peak = unique_peak_index(v, unique);
    if (!unique) return std::nullopt;

    // Mainlobe edge: first local minimum walking outward from the peak.
    std::optional<std::size_t> left_edge, right_edge;
    for (std::size_t i = peak; i-- > 1;) {
        if (v[i] <= v[i - 1]) {
            left_edge = i;
            break;
        }
    }
    for (std::size_t i = peak + 1; i + 1 < n; ++i) {
        if (v[i] <= v[i + 1]) {
            right_edge = i;
            break;
        }
    }
    if (!left_edge && !right_edge) return std::nullopt;

    double best = -std::numeric_limits<double>::infinity();
    bool any = false;
    if (left_edge && *left_edge > 0) {
        for (std::size_t i = 0; i < *left_edge; ++i) best = std::max(best, v[i]);
        any = true;
    }
    if (right_edge && *right_edge + 1 < n) {
        for (std::size_t i = *right_edge + 1; i < n; ++i) best = std::max(best, v[i]);
        any = true;
    }
    if (!any) return std::nullopt;
    return best;
}

}  // namespace pabeam
