#include "pabeam/phantom.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "pabeam/parallel.hpp"

namespace pabeam {

namespace {

// |P(f)| of the derivative-of-Gaussian pulse is proportional to
// u*exp((1-u^2)/2) with u = f/f_peak. The -6 dB (half-amplitude) crossings
// u_lo < 1 < u_hi of that shape are universal constants; solve once.
double half_amplitude_root(double lo, double hi) {
    auto h = [](double u) { return u * std::exp(0.5 * (1.0 - u * u)) - 0.5; };
    double flo = h(lo);
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        double fmid = h(mid);
        if ((fmid > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double spectral_width_factor() {
    // u_hi - u_lo: ratio of the -6 dB spectral width to the spectral peak.
    static const double du = half_amplitude_root(1.0, 6.0) - half_amplitude_root(1e-6, 1.0);
    return du;
}

struct SourceGeom {
    double x, z, amplitude;
};

}  // namespace

NoiseSpec NoiseSpec::noiseless(std::uint64_t seed) {
    NoiseSpec n;
    n.snr_db = std::numeric_limits<double>::infinity();
    n.seed = seed;
    return n;
}

double pulse_time_constant(const AcquisitionParams& acq) {
    const double width_hz = acq.fractional_bandwidth * acq.center_frequency;
    if (!(width_hz > 0.0)) throw std::invalid_argument("pulse bandwidth must be > 0");
    // width = (u_hi - u_lo) * f_peak and f_peak = 1/(2 pi tau).
    return spectral_width_factor() / (2.0 * std::numbers::pi * width_hz);
}

double synthesize_pulse(const AcquisitionParams& acq, double t_relative) {
    const double tau = pulse_time_constant(acq);
    const double u = t_relative / tau;
    return -(u / tau) * std::exp(-0.5 * u * u);
}

std::vector<PointSource> realize_sources(const Phantom& phantom, std::mt19937_64& rng) {
    std::vector<PointSource> out = phantom.points;
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (const Cyst& c : phantom.cysts) {
        const double r_mm = c.radius * 1e3;
        const double area_mm2 = std::numbers::pi * r_mm * r_mm;
        const auto count = static_cast<std::size_t>(std::ceil(c.density_per_mm2 * area_mm2));
        for (std::size_t s = 0; s < count; ++s) {
            const double rr = c.radius * std::sqrt(uni(rng));
            const double th = 2.0 * std::numbers::pi * uni(rng);
            PointSource p;
            p.lateral = c.lateral + rr * std::cos(th);
            p.axial = c.axial + rr * std::sin(th);
            p.radius = 0.0;
            p.amplitude = c.amplitude;
            out.push_back(p);
        }
    }
    return out;
}

ChannelFrame simulate_channels(const Phantom& phantom, const ArrayGeometry& geom,
                               const AcquisitionParams& acq, const NoiseSpec& noise,
                               unsigned n_threads) {
    if (phantom.empty()) throw std::invalid_argument("phantom has no sources");
    for (const PointSource& p : phantom.points) {
        if (!(p.axial > 0.0)) throw std::invalid_argument("point source behind the array");
        if (!(p.radius >= 0.0) || !(p.amplitude > 0.0))
            throw std::invalid_argument("invalid point source");
    }
    for (const Cyst& c : phantom.cysts) {
        if (!(c.radius > 0.0) || !(c.amplitude > 0.0) || !(c.density_per_mm2 > 0.0))
            throw std::invalid_argument("invalid cyst");
        if (!(c.axial - c.radius > 0.0)) throw std::invalid_argument("cyst extends behind the array");
    }
    if (std::isnan(noise.snr_db) || noise.snr_db == -std::numeric_limits<double>::infinity())
        throw std::invalid_argument("noise snr_db must be finite or +inf");

    std::mt19937_64 rng(noise.seed);
    const std::vector<PointSource> sources = realize_sources(phantom, rng);

    ChannelFrame frame;
    frame.num_elements = geom.num_elements;
    frame.num_samples = acq.num_samples;
    frame.sampling_frequency = acq.sampling_frequency;
    frame.sound_speed = acq.sound_speed;
    frame.rng_seed = noise.seed;
    frame.samples.assign(static_cast<std::size_t>(geom.num_elements) * acq.num_samples, 0.0);

    const double fs = acq.sampling_frequency;
    const double c = acq.sound_speed;
    const double tau = pulse_time_constant(acq);
    const double inv_tau2 = 1.0 / (tau * tau);
    // Pulse support: |p| at 8*tau is ~1e-13 of the peak, below every tolerance
    // used downstream.
    const double support = 8.0 * tau;
    const int n = acq.num_samples;

    std::vector<SourceGeom> sg(sources.size());
    for (std::size_t s = 0; s < sources.size(); ++s)
        sg[s] = {sources[s].lateral, sources[s].axial, sources[s].amplitude};

    // Parallel over elements; each channel accumulates sources in list order,
    // so the result does not depend on the thread count.
    parallel_for_chunks(0, static_cast<std::size_t>(geom.num_elements),
        [&](std::size_t e0, std::size_t e1) {
            for (std::size_t i = e0; i < e1; ++i) {
                double* ch = frame.samples.data() + i * static_cast<std::size_t>(n);
                const double ex = geom.element_x[i];
                for (const SourceGeom& s : sg) {
                    const double dx = s.x - ex;
                    const double r = std::sqrt(dx * dx + s.z * s.z);
                    const double t0 = r / c;
                    const double a = s.amplitude / r;
                    int k_lo = static_cast<int>(std::ceil((t0 - support) * fs));
                    int k_hi = static_cast<int>(std::floor((t0 + support) * fs));
                    if (k_lo < 0) k_lo = 0;
                    if (k_hi > n - 1) k_hi = n - 1;
                    for (int k = k_lo; k <= k_hi; ++k) {
                        const double t = static_cast<double>(k) / fs - t0;
                        ch[k] += a * (-(t * inv_tau2) * std::exp(-0.5 * t * t * inv_tau2));
                    }
                }
            }
        },
        n_threads);

    if (std::isfinite(noise.snr_db)) {
        double energy = 0.0;
        for (double v : frame.samples) energy += v * v;
        const double rms = std::sqrt(energy / static_cast<double>(frame.samples.size()));
        const double sigma = rms * std::pow(10.0, -noise.snr_db / 20.0);
        if (sigma > 0.0) {
            std::normal_distribution<double> gauss(0.0, sigma);
            for (double& v : frame.samples) v += gauss(rng);
        }
    }
    return frame;
}

Scenario build_scenario(const std::string& name, std::uint64_t seed) {
    Scenario s;
    s.name = name;
    s.noise.seed = seed;

    auto points_layout = [&]() {
        // Eleven 0.1 mm radius absorbers on axis, 25 mm to 75 mm every 5 mm.
        for (int j = 0; j < 11; ++j) {
            PointSource p;
            p.lateral = 0.0;
            p.axial = (25.0 + 5.0 * j) * 1e-3;
            p.radius = 0.1e-3;
            p.amplitude = 1.0;
            s.phantom.points.push_back(p);
        }
        s.axial_min = 20e-3;
        s.axial_max = 80e-3;
        for (int j = 0; j < 11; ++j) s.eval_depths.push_back((25.0 + 5.0 * j) * 1e-3);
    };
    auto cysts_layout = [&]() {
        for (double depth_mm : {20.0, 29.0}) {
            Cyst c;
            c.lateral = 0.0;
            c.axial = depth_mm * 1e-3;
            c.radius = 4e-3;
            c.density_per_mm2 = 50.0;
            c.amplitude = 1.0;
            s.phantom.cysts.push_back(c);
            s.eval_depths.push_back(c.axial);
        }
        s.axial_min = 12e-3;
        s.axial_max = 36e-3;
    };

    if (name == "points-40db") {
        points_layout();
        s.noise.snr_db = 40.0;
    } else if (name == "points-0db") {
        points_layout();
        s.noise.snr_db = 0.0;
    } else if (name == "points-sos-error") {
        points_layout();
        s.noise.snr_db = 40.0;
        s.recon_sos_factor = 1.05;
    } else if (name == "cysts-40db") {
        cysts_layout();
        s.noise.snr_db = 40.0;
    } else if (name == "cysts-0db") {
        cysts_layout();
        s.noise.snr_db = 0.0;
    } else {
        throw std::invalid_argument("unknown scenario: " + name);
    }
    return s;
}

std::vector<std::string> scenario_names() {
    return {"points-40db", "points-0db", "points-sos-error", "cysts-40db", "cysts-0db"};
}

}  // namespace pabeam
