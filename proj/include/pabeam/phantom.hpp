// Analytic photoacoustic forward model: point/disk absorbers, a band-limited
// bipolar source pulse, and calibrated additive white Gaussian noise.
#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "pabeam/geometry.hpp"

namespace pabeam {

struct PointSource {
    double lateral = 0.0;    // meters
    double axial = 0.0;      // meters, > 0
    double radius = 0.0;     // meters, metadata only (below pulse resolution)
    double amplitude = 1.0;
};

struct Cyst {
    double lateral = 0.0;          // center, meters
    double axial = 0.0;            // center, meters
    double radius = 0.0;           // meters
    double density_per_mm2 = 50.0; // realized source density
    double amplitude = 1.0;
};

struct Phantom {
    std::vector<PointSource> points;
    std::vector<Cyst> cysts;
    bool empty() const { return points.empty() && cysts.empty(); }
};

struct NoiseSpec {
    // Noise std = rms(clean signal over all channels/samples) * 10^(-snr_db/20).
    // +infinity disables noise.
    double snr_db = 0.0;
    std::uint64_t seed = 0;

    static NoiseSpec noiseless(std::uint64_t seed = 0);
};

struct ChannelFrame {
    int num_elements = 0;
    int num_samples = 0;
    double sampling_frequency = 0.0;  // Hz
    double sound_speed = 0.0;         // m/s
    std::uint64_t rng_seed = 0;
    std::vector<double> samples;      // [element * num_samples + sample]

    double* channel(int i) { return samples.data() + static_cast<std::size_t>(i) * num_samples; }
    const double* channel(int i) const {
        return samples.data() + static_cast<std::size_t>(i) * num_samples;
    }
};

// Time constant of the derivative-of-Gaussian pulse, fixed so the -6 dB
// spectral width equals fractional_bandwidth * center_frequency.
double pulse_time_constant(const AcquisitionParams& acq);

// p(t) = -(t/tau^2) exp(-t^2 / (2 tau^2)); odd, bipolar, band-limited.
double synthesize_pulse(const AcquisitionParams& acq, double t_relative);

// Draws the point sources realizing a phantom: declared points verbatim, then
// per cyst ceil(density * area_mm2) sources uniform in the disk.
std::vector<PointSource> realize_sources(const Phantom& phantom, std::mt19937_64& rng);

// samples[i][k] = sum_sources amplitude/r_i * p(k/fs - r_i/c) + noise.
// Deterministic for a given (phantom, noise.seed).
ChannelFrame simulate_channels(const Phantom& phantom, const ArrayGeometry& geom,
                               const AcquisitionParams& acq, const NoiseSpec& noise,
                               unsigned n_threads = 0);

struct Scenario {
    std::string name;
    Phantom phantom;
    NoiseSpec noise;
    double recon_sos_factor = 1.0;  // reconstruction sound speed = factor * true
    // Scenario-specific grid axial extent (meters) and evaluation depths.
    double axial_min = 0.0, axial_max = 0.0;
    std::vector<double> eval_depths;
};

// Known names: points-40db, points-0db, points-sos-error, cysts-40db,
// cysts-0db. The seed feeds noise and cyst realization.
Scenario build_scenario(const std::string& name, std::uint64_t seed);
std::vector<std::string> scenario_names();

}  // namespace pabeam
