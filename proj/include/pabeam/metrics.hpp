// Image-quality metrics: lateral profiles, -6 dB FWHM, sidelobe level, SNR
// and contrast ratio.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pabeam/beamform.hpp"

namespace pabeam {

struct LateralProfile {
    double depth = 0.0;            // meters (actual grid row depth)
    std::vector<double> lateral;   // meters
    std::vector<double> values_db; // renormalized so max = 0 dB
};

struct RectROI {
    double lateral_min = 0.0, lateral_max = 0.0;  // meters
    double axial_min = 0.0, axial_max = 0.0;

    bool contains(double lateral, double axial) const {
        return lateral >= lateral_min && lateral <= lateral_max && axial >= axial_min &&
               axial <= axial_max;
    }
    bool overlaps(const RectROI& o) const {
        return lateral_min <= o.lateral_max && o.lateral_min <= lateral_max &&
               axial_min <= o.axial_max && o.axial_min <= axial_max;
    }
};

struct DiskROI {
    double lateral = 0.0, axial = 0.0, radius = 0.0;  // meters
    bool contains(double x, double z) const {
        const double dx = x - lateral, dz = z - axial;
        return dx * dx + dz * dz <= radius * radius;
    }
};

struct AnnulusROI {
    double lateral = 0.0, axial = 0.0;
    double inner_radius = 0.0, outer_radius = 0.0;  // meters
    std::vector<DiskROI> exclusions;                // e.g. neighboring cysts

    bool contains(double x, double z) const {
        const double dx = x - lateral, dz = z - axial;
        const double d2 = dx * dx + dz * dz;
        if (d2 < inner_radius * inner_radius || d2 > outer_radius * outer_radius) return false;
        for (const DiskROI& e : exclusions)
            if (e.contains(x, z)) return false;
        return true;
    }
};

struct MetricsRow {
    std::string method;
    std::string scenario;
    double target_depth_mm = 0.0;
    std::optional<double> fwhm_um;
    std::optional<double> snr_db;
    std::optional<double> cr_db;
    std::optional<double> sidelobe_db;
};

struct MetricsReport {
    std::vector<MetricsRow> rows;
};

// Nearest row to the requested depth, renormalized so the row max is 0 dB.
// Throws if the depth lies outside the grid.
LateralProfile extract_profile(const BeamformedImage& db_image, double depth);

// Width between the two -6 dB crossings nearest the (unique) peak, located by
// linear interpolation in dB. Returns micrometers; nullopt when undefined.
std::optional<double> fwhm_minus6db(const LateralProfile& profile);

// 20*log10(peak envelope in target / std of envelope in background). Nullopt
// when the background std is zero. ROIs must be disjoint and inside the grid.
std::optional<double> snr(const BeamformedImage& env_image, const RectROI& target,
                          const RectROI& background);

// 20*log10(mean envelope inside / mean envelope outside). Nullopt when the
// outside mean is zero.
std::optional<double> contrast_ratio(const BeamformedImage& env_image, const DiskROI& inside,
                                     const AnnulusROI& outside);

// Peak profile value outside the mainlobe (peak to first local minimum on
// each side). Nullopt when the profile is monotone off the peak on both
// sides.
std::optional<double> sidelobe_level(const LateralProfile& profile);

}  // namespace pabeam
