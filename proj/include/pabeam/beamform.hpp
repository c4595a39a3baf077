// Beamformers: delay-and-sum, coherence-factor weighting, minimum-variance
// (spatial smoothing + diagonal loading + temporal averaging) and the
// high-resolution coherence factor built on the MV output.
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pabeam/geometry.hpp"
#include "pabeam/phantom.hpp"

namespace pabeam {

enum class Method { das, das_cf, mv, mv_cf, das_hrcf };

const std::vector<Method>& all_methods();
std::string method_label(Method m);       // "DAS", "DAS+CF", "MV", "MV+CF", "DAS+HRCF"
std::string method_file_stem(Method m);   // "das", "das_cf", ...
Method parse_method(const std::string& label);  // throws on unknown label

struct MVParams {
    int subarray_length = 0;      // L
    int temporal_half_window = 5; // K
    double loading_constant = 0.0;  // Delta; loading factor gamma = Delta * trace(R)

    static MVParams defaults(int num_elements);
    void validate(int num_elements) const;
};

// Delay-aligned per-element samples for one pixel at one time offset.
struct DelayedSnapshot {
    std::vector<double> values;  // length M
};

struct CovarianceEstimate {
    int dim = 0;                 // L
    std::vector<double> matrix;  // R-hat, L x L row-major, symmetric
    std::vector<double> loaded;  // R-hat + gamma I
    double trace = 0.0;          // trace(R-hat)
};

struct BeamformedImage {
    enum class Stage { rf, envelope, db };
    ImagingGrid grid;
    Stage stage = Stage::rf;
    std::string method;
    std::vector<double> values;  // [axial_row * n_lateral + lateral_col]

    double& at(std::size_t row, std::size_t col) { return values[grid.pixel_index(row, col)]; }
    double at(std::size_t row, std::size_t col) const { return values[grid.pixel_index(row, col)]; }
};

// Linear interpolation of channel i at fractional sample t; out-of-record
// positions contribute 0.
double sample_channel(const ChannelFrame& frame, int element, double t);

DelayedSnapshot delay_and_align(const ChannelFrame& frame, const DelayTable& delays,
                                std::size_t pixel);

double das(const DelayedSnapshot& snapshot);

// |sum x|^2 / (M sum x^2); 0 when the denominator vanishes. Always in [0, 1].
double coherence_factor(const DelayedSnapshot& snapshot);

// Nominal time index of a pixel: its axial depth converted to samples with the
// reconstruction sound speed. Used only to clip the temporal-averaging window
// to the record.
long pixel_time_index(double axial_m, double sound_speed, double sampling_frequency);

// Spatially smoothed, temporally averaged sample covariance over subarrays of
// length L, windows [k-K, k+K] clipped to the record (normalized by the actual
// count), plus the diagonally loaded copy.
CovarianceEstimate estimate_covariance(const ChannelFrame& frame, const DelayTable& delays,
                                       std::size_t pixel, long k, const MVParams& params);

// Distortionless minimum-variance weights W = R_l^{-1} a / (a^T R_l^{-1} a)
// with a = ones(L). Empty optional when the covariance is degenerate
// (trace below 1e-300); callers output 0 for that sample.
std::optional<std::vector<double>> mv_weights(const CovarianceEstimate& cov,
                                              const MVParams& params);

// Subarray-averaged weighted output (1/(M-L+1)) sum_l W^T X^l for an explicit
// weight vector; exposed so degenerate configurations can be probed directly.
double subarray_average_output(const DelayedSnapshot& snapshot,
                               const std::vector<double>& weights);

double mv_output(const ChannelFrame& frame, const DelayTable& delays, std::size_t pixel,
                 long k, const MVParams& params);

// HRCF = M |y_mv|^2 / sum x_i^2 for a given MV output value.
double hrcf_from(const DelayedSnapshot& snapshot, double y_mv);

double hrcf(const ChannelFrame& frame, const DelayTable& delays, std::size_t pixel, long k,
            const MVParams& params);

// Forms the RF image for one method; k per pixel is the pixel's own sample
// index implied by its axial delay. sound_speed_override must match the one
// used for the delay table.
BeamformedImage beamform_image(const ChannelFrame& frame, const DelayTable& delays,
                               const ImagingGrid& grid, Method method, const MVParams& params,
                               std::optional<double> sound_speed_override = std::nullopt,
                               unsigned n_threads = 0);

// Forms several methods in one pass, sharing the per-pixel snapshots,
// covariance and MV solve across methods.
std::map<Method, BeamformedImage> beamform_images(
    const ChannelFrame& frame, const DelayTable& delays, const ImagingGrid& grid,
    const std::vector<Method>& methods, const MVParams& params,
    std::optional<double> sound_speed_override = std::nullopt, unsigned n_threads = 0);

}  // namespace pabeam
