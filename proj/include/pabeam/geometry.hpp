// Linear-array geometry, acquisition parameters, imaging grid and one-way
// time-of-flight delay tables.
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <tuple>
#include <vector>

namespace pabeam {

struct ArrayGeometry {
    int num_elements = 0;
    double pitch = 0.0;  // meters
    // Lateral element coordinates in meters, strictly increasing and
    // symmetric about 0.
    std::vector<double> element_x;

    double aperture_width() const { return element_x.back() - element_x.front(); }
};

struct AcquisitionParams {
    double sampling_frequency = 50e6;   // Hz
    double sound_speed = 1540.0;        // m/s
    int num_samples = 0;                // per-channel record length
    double center_frequency = 7e6;      // Hz
    double fractional_bandwidth = 0.77; // -6 dB fractional bandwidth
};

struct ImagingGrid {
    double lateral_min = 0.0, lateral_max = 0.0;  // meters
    double axial_min = 0.0, axial_max = 0.0;      // meters
    double lateral_step = 0.0, axial_step = 0.0;  // meters
    std::vector<double> lateral;  // pixel lateral coordinates
    std::vector<double> axial;    // pixel axial (depth) coordinates

    std::size_t n_lateral() const { return lateral.size(); }
    std::size_t n_axial() const { return axial.size(); }
    std::size_t n_pixels() const { return lateral.size() * axial.size(); }
    // pixel index convention: row-major over (axial row, lateral column)
    std::size_t pixel_index(std::size_t row, std::size_t col) const {
        return row * lateral.size() + col;
    }
    std::size_t nearest_row(double depth) const;
    // Sub-grid covering axial rows [row_begin, row_end); coordinates are
    // copied verbatim so banded processing is bit-identical to whole-grid.
    ImagingGrid slice_rows(std::size_t row_begin, std::size_t row_end) const;
};

struct GeometryConfig {
    int num_elements = 128;
    double pitch = 0.3e-3;
    double sampling_frequency = 50e6;
    double sound_speed = 1540.0;
    int num_samples = 1024;
    double center_frequency = 7e6;
    double fractional_bandwidth = 0.77;
    double lateral_min = -10e-3, lateral_max = 10e-3;
    double axial_min = 5e-3, axial_max = 40e-3;
    double lateral_step = 0.05e-3, axial_step = 0.05e-3;
};

// Per-pixel, per-element one-way delays in fractional samples.
struct DelayTable {
    std::size_t n_pixels = 0;
    int num_elements = 0;
    std::vector<double> delays;      // [pixel * num_elements + element]
    std::vector<std::uint8_t> valid; // delay inside [0, num_samples-1]

    const double* row(std::size_t pixel) const { return delays.data() + pixel * num_elements; }
    const std::uint8_t* valid_row(std::size_t pixel) const {
        return valid.data() + pixel * num_elements;
    }
};

// Validates config values and returns the populated types. Throws
// std::invalid_argument on violated invariants (non-positive pitch/steps,
// sampling below Nyquist, ...).
std::tuple<ArrayGeometry, AcquisitionParams, ImagingGrid> build_geometry(const GeometryConfig& cfg);

ArrayGeometry make_array_geometry(int num_elements, double pitch);
ImagingGrid make_grid(double lateral_min, double lateral_max, double lateral_step,
                      double axial_min, double axial_max, double axial_step);

// One-way delays (photoacoustic: source -> element). If sound_speed_override
// is given it replaces acq.sound_speed for the reconstruction delays only.
DelayTable compute_delay_table(const ArrayGeometry& geom, const AcquisitionParams& acq,
                               const ImagingGrid& grid,
                               std::optional<double> sound_speed_override = std::nullopt);

}  // namespace pabeam
