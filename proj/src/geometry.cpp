#include "pabeam/geometry.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace pabeam {

namespace {

std::size_t axis_count(double lo, double hi, double step) {
    // floor((max-min)/step)+1, with a relative epsilon so exact multiples do
    // not lose a pixel to rounding.
    double ratio = (hi - lo) / step;
    return static_cast<std::size_t>(std::floor(ratio * (1.0 + 1e-12) + 1e-12)) + 1;
}

std::vector<double> axis_coords(double lo, double step, std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = lo + static_cast<double>(i) * step;
    return v;
}

}  // namespace

std::size_t ImagingGrid::nearest_row(double depth) const {
    if (axial.empty()) throw std::invalid_argument("grid has no axial rows");
    if (depth < axial.front() - 0.5 * axial_step || depth > axial.back() + 0.5 * axial_step)
        throw std::invalid_argument("depth outside grid");
    double r = (depth - axial_min) / axial_step;
    long idx = std::lround(r);
    if (idx < 0) idx = 0;
    if (idx >= static_cast<long>(axial.size())) idx = static_cast<long>(axial.size()) - 1;
    return static_cast<std::size_t>(idx);
}

ImagingGrid ImagingGrid::slice_rows(std::size_t row_begin, std::size_t row_end) const {
    if (row_begin >= row_end || row_end > axial.size())
        throw std::invalid_argument("invalid row slice");
    ImagingGrid g;
    g.lateral_min = lateral_min;
    g.lateral_max = lateral_max;
    g.lateral_step = lateral_step;
    g.axial_step = axial_step;
    g.lateral = lateral;
    g.axial.assign(axial.begin() + row_begin, axial.begin() + row_end);
    g.axial_min = g.axial.front();
    g.axial_max = g.axial.back();
    return g;
}

ArrayGeometry make_array_geometry(int num_elements, double pitch) {
    if (num_elements < 2) throw std::invalid_argument("num_elements must be >= 2");
    if (!(pitch > 0.0)) throw std::invalid_argument("pitch must be > 0");
    ArrayGeometry g;
    g.num_elements = num_elements;
    g.pitch = pitch;
    g.element_x.resize(num_elements);
    // (2i - (M-1)) * pitch/2 keeps the positions exactly antisymmetric.
    const double half_pitch = 0.5 * pitch;
    for (int i = 0; i < num_elements; ++i)
        g.element_x[i] = static_cast<double>(2 * i - (num_elements - 1)) * half_pitch;
    return g;
}

ImagingGrid make_grid(double lateral_min, double lateral_max, double lateral_step,
                      double axial_min, double axial_max, double axial_step) {
    if (!(lateral_max > lateral_min) || !(axial_max > axial_min))
        throw std::invalid_argument("grid max must exceed min on both axes");
    if (!(lateral_step > 0.0) || !(axial_step > 0.0))
        throw std::invalid_argument("grid steps must be > 0");
    ImagingGrid g;
    g.lateral_min = lateral_min;
    g.lateral_max = lateral_max;
    g.axial_min = axial_min;
    g.axial_max = axial_max;
    g.lateral_step = lateral_step;
    g.axial_step = axial_step;
    g.lateral = axis_coords(lateral_min, lateral_step, axis_count(lateral_min, lateral_max, lateral_step));
    g.axial = axis_coords(axial_min, axial_step, axis_count(axial_min, axial_max, axial_step));
    return g;
}

std::tuple<ArrayGeometry, AcquisitionParams, ImagingGrid> build_geometry(const GeometryConfig& cfg) {
    AcquisitionParams acq;
    acq.sampling_frequency = cfg.sampling_frequency;
    acq.sound_speed = cfg.sound_speed;
    acq.num_samples = cfg.num_samples;
    acq.center_frequency = cfg.center_frequency;
    acq.fractional_bandwidth = cfg.fractional_bandwidth;

    if (!(acq.sound_speed > 0.0)) throw std::invalid_argument("sound_speed must be > 0");
    if (acq.num_samples <= 0) throw std::invalid_argument("num_samples must be > 0");
    if (!(acq.fractional_bandwidth > 0.0 && acq.fractional_bandwidth < 2.0))
        throw std::invalid_argument("fractional_bandwidth must be in (0, 2)");
    if (!(acq.sampling_frequency > 2.0 * acq.center_frequency))
        throw std::invalid_argument("sampling_frequency must exceed 2x center_frequency");

    ArrayGeometry geom = make_array_geometry(cfg.num_elements, cfg.pitch);
    ImagingGrid grid = make_grid(cfg.lateral_min, cfg.lateral_max, cfg.lateral_step,
                                 cfg.axial_min, cfg.axial_max, cfg.axial_step);
    return {std::move(geom), acq, std::move(grid)};
}

DelayTable compute_delay_table(const ArrayGeometry& geom, const AcquisitionParams& acq,
                               const ImagingGrid& grid,
                               std::optional<double> sound_speed_override) {
    double c = acq.sound_speed;
    if (sound_speed_override) {
        if (!(*sound_speed_override > 0.0))
            throw std::invalid_argument("sound speed override must be > 0");
        c = *sound_speed_override;
    }
    const double samples_per_meter = acq.sampling_frequency / c;
    const double max_delay = static_cast<double>(acq.num_samples - 1);

    DelayTable t;
    t.n_pixels = grid.n_pixels();
    t.num_elements = geom.num_elements;
    t.delays.resize(t.n_pixels * geom.num_elements);
    t.valid.resize(t.n_pixels * geom.num_elements);

    std::size_t p = 0;
    for (std::size_t r = 0; r < grid.n_axial(); ++r) {
        const double z = grid.axial[r];
        const double z2 = z * z;
        for (std::size_t cidx = 0; cidx < grid.n_lateral(); ++cidx, ++p) {
            const double x = grid.lateral[cidx];
            double* row = t.delays.data() + p * geom.num_elements;
            std::uint8_t* vrow = t.valid.data() + p * geom.num_elements;
            for (int i = 0; i < geom.num_elements; ++i) {
                const double dx = x - geom.element_x[i];
                const double delay = std::sqrt(dx * dx + z2) * samples_per_meter;
                row[i] = delay;
                vrow[i] = (delay >= 0.0 && delay <= max_delay) ? 1 : 0;
            }
        }
    }
    return t;
}

}  // namespace pabeam
