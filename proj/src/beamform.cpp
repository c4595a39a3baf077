#include "pabeam/beamform.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pabeam/linalg.hpp"
#include "pabeam/parallel.hpp"
#include "pabeam/simd/kernels.hpp"

namespace pabeam {

namespace {

constexpr double kDegenerateTrace = 1e-300;

struct Scratch {
    int m = 0, l = 0;
    std::vector<double> x0;      // snapshot at offset 0
    std::vector<double> xn;      // snapshot at offset n
    std::vector<double> lag;     // lag products, l rows x m columns
    std::vector<double> prefix;  // m+1
    std::vector<double> r;       // covariance, l x l
    std::vector<double> loaded;  // loaded covariance, l x l
    std::vector<double> chol;    // cholesky scratch, l x l
    std::vector<double> rhs;     // all-ones steering, l
    std::vector<double> w;       // normalized weights, l
    std::vector<double> cw;      // correlated weights over full aperture, m
    std::vector<double> pw;      // weight prefix sums, l+1

    void prepare(int m_, int l_) {
        m = m_;
        l = l_;
        x0.resize(m);
        xn.resize(m);
        lag.resize(static_cast<std::size_t>(l) * m);
        prefix.resize(m + 1);
        r.resize(static_cast<std::size_t>(l) * l);
        loaded.resize(static_cast<std::size_t>(l) * l);
        chol.resize(static_cast<std::size_t>(l) * l);
        rhs.assign(l, 1.0);
        w.resize(l);
        cw.resize(m);
        pw.resize(l + 1);
    }
};

inline double interp_channel(const double* ch, int n, double t) {
    if (!(t >= 0.0) || t > static_cast<double>(n - 1)) return 0.0;
    const double fl = std::floor(t);
    const int i0 = static_cast<int>(fl);
    const double frac = t - fl;
    if (i0 >= n - 1) return ch[n - 1];
    return ch[i0] * (1.0 - frac) + ch[i0 + 1] * frac;
}

void build_snapshot(const ChannelFrame& frame, const double* delay_row, int offset, double* out) {
    const int n = frame.num_samples;
    for (int i = 0; i < frame.num_elements; ++i)
        out[i] = interp_channel(frame.channel(i), n, delay_row[i] + static_cast<double>(offset));
}

// Fills scratch.r with the normalized, spatially smoothed, temporally averaged
// covariance. Returns the number of time offsets that landed in the record.
int compute_covariance(const ChannelFrame& frame, const double* delay_row, long k,
                       const MVParams& params, Scratch& s) {
    const auto& K = simd::kernels();
    const int m = frame.num_elements;
    const int l = params.subarray_length;
    const int sub_count = m - l + 1;

    std::fill(s.lag.begin(), s.lag.end(), 0.0);
    int count = 0;
    for (int n = -params.temporal_half_window; n <= params.temporal_half_window; ++n) {
        const long kn = k + n;
        if (kn < 0 || kn >= frame.num_samples) continue;
        double* snap = (n == 0) ? s.x0.data() : s.xn.data();
        build_snapshot(frame, delay_row, n, snap);
        K.accum_lag_products(snap, static_cast<std::size_t>(m), static_cast<std::size_t>(l),
                             s.lag.data(), static_cast<std::size_t>(m));
        ++count;
    }

    if (count == 0) {
        std::fill(s.r.begin(), s.r.end(), 0.0);
        return 0;
    }

    // R[i][i+d] is a length-(M-L+1) window sum over the lag-d products;
    // prefix sums turn each entry into one subtraction.
    const double inv_norm = 1.0 / (static_cast<double>(count) * static_cast<double>(sub_count));
    for (int d = 0; d < l; ++d) {
        const double* row = s.lag.data() + static_cast<std::size_t>(d) * m;
        const int len = m - d;
        s.prefix[0] = 0.0;
        for (int i = 0; i < len; ++i) s.prefix[i + 1] = s.prefix[i] + row[i];
        for (int i = 0; i + d < l; ++i) {
            const double v = (s.prefix[i + sub_count] - s.prefix[i]) * inv_norm;
            s.r[static_cast<std::size_t>(i) * l + (i + d)] = v;
            s.r[static_cast<std::size_t>(i + d) * l + i] = v;
        }
    }
    return count;
}

double trace_of(const std::vector<double>& a, int n) {
    double t = 0.0;
    for (int i = 0; i < n; ++i) t += a[static_cast<std::size_t>(i) * n + i];
    return t;
}

void load_covariance(const std::vector<double>& r, int l, double gamma, std::vector<double>& out) {
    out = r;
    for (int i = 0; i < l; ++i) out[static_cast<std::size_t>(i) * l + i] += gamma;
}

// Solves for the distortionless weights in scratch.w. Returns false for a
// degenerate covariance.
bool solve_weights(const MVParams& params, Scratch& s) {
    const int l = params.subarray_length;
    const double tr = trace_of(s.r, l);
    if (!(tr >= kDegenerateTrace)) return false;
    load_covariance(s.r, l, params.loading_constant * tr, s.loaded);
    if (!spd_solve(s.loaded.data(), static_cast<std::size_t>(l), s.rhs.data(), s.w.data(),
                   s.chol.data()))
        return false;
    double wsum = 0.0;
    for (int i = 0; i < l; ++i) wsum += s.w[i];
    if (wsum == 0.0 || !std::isfinite(wsum)) return false;
    const double inv = 1.0 / wsum;
    for (int i = 0; i < l; ++i) s.w[i] *= inv;
    return true;
}

// (1/(M-L+1)) sum_l W^T X^l collapses to one full-aperture dot product with
// the window-summed weights.
double weighted_subarray_output(const double* x0, int m, const double* w, int l, Scratch& s) {
    const int sub_count = m - l + 1;
    s.pw[0] = 0.0;
    for (int j = 0; j < l; ++j) s.pw[j + 1] = s.pw[j] + w[j];
    for (int idx = 0; idx < m; ++idx) {
        const int j_lo = std::max(0, idx - (sub_count - 1));
        const int j_hi = std::min(l - 1, idx);
        s.cw[idx] = s.pw[j_hi + 1] - s.pw[j_lo];
    }
    const double total = simd::kernels().dot(x0, s.cw.data(), static_cast<std::size_t>(m));
    return total / static_cast<double>(sub_count);
}

struct PixelOutputs {
    double das = 0.0, das_cf = 0.0, mv = 0.0, mv_cf = 0.0, das_hrcf = 0.0;
};

void compute_pixel(const ChannelFrame& frame, const double* delay_row, long k,
                   const MVParams& params, bool need_mv, Scratch& s, PixelOutputs& out) {
    const auto& K = simd::kernels();
    const int m = frame.num_elements;

    build_snapshot(frame, delay_row, 0, s.x0.data());
    const double sum0 = K.sum(s.x0.data(), static_cast<std::size_t>(m));
    const double sumsq0 = K.sumsq(s.x0.data(), static_cast<std::size_t>(m));
    const double cf =
        sumsq0 > 0.0 ? std::min(1.0, (sum0 * sum0) / (static_cast<double>(m) * sumsq0)) : 0.0;

    out.das = sum0;
    out.das_cf = cf * sum0;

    double y_mv = 0.0;
    if (need_mv) {
        const int count = compute_covariance(frame, delay_row, k, params, s);
        if (count > 0 && solve_weights(params, s))
            y_mv = weighted_subarray_output(s.x0.data(), m, s.w.data(), params.subarray_length, s);
    }
    out.mv = y_mv;
    out.mv_cf = cf * y_mv;
    const double hr = sumsq0 > 0.0 ? static_cast<double>(m) * y_mv * y_mv / sumsq0 : 0.0;
    out.das_hrcf = hr * sum0;
}

}  // namespace

const std::vector<Method>& all_methods() {
    static const std::vector<Method> v = {Method::das, Method::das_cf, Method::mv, Method::mv_cf,
                                          Method::das_hrcf};
    return v;
}

std::string method_label(Method m) {
    switch (m) {
        case Method::das: return "DAS";
        case Method::das_cf: return "DAS+CF";
        case Method::mv: return "MV";
        case Method::mv_cf: return "MV+CF";
        case Method::das_hrcf: return "DAS+HRCF";
    }
    throw std::invalid_argument("unknown method");
}

std::string method_file_stem(Method m) {
    switch (m) {
        case Method::das: return "das";
        case Method::das_cf: return "das_cf";
        case Method::mv: return "mv";
        case Method::mv_cf: return "mv_cf";
        case Method::das_hrcf: return "das_hrcf";
    }
    throw std::invalid_argument("unknown method");
}

Method parse_method(const std::string& label) {
    for (Method m : all_methods())
        if (method_label(m) == label || method_file_stem(m) == label) return m;
    throw std::invalid_argument("unknown method label: " + label);
}

MVParams MVParams::defaults(int num_elements) {
    MVParams p;
    p.subarray_length = std::max(1, num_elements / 2);
    p.temporal_half_window = 5;
    p.loading_constant = 1.0 / (100.0 * p.subarray_length);
    return p;
}

void MVParams::validate(int num_elements) const {
    if (subarray_length < 1 || subarray_length > num_elements)
        throw std::invalid_argument("subarray_length must be in [1, num_elements]");
    if (temporal_half_window < 0) throw std::invalid_argument("temporal_half_window must be >= 0");
    if (!(loading_constant > 0.0)) throw std::invalid_argument("loading_constant must be > 0");
}

double sample_channel(const ChannelFrame& frame, int element, double t) {
    return interp_channel(frame.channel(element), frame.num_samples, t);
}

DelayedSnapshot delay_and_align(const ChannelFrame& frame, const DelayTable& delays,
                                std::size_t pixel) {
    if (pixel >= delays.n_pixels) throw std::invalid_argument("pixel outside grid");
    if (delays.num_elements != frame.num_elements)
        throw std::invalid_argument("delay table / frame element mismatch");
    DelayedSnapshot snap;
    snap.values.resize(frame.num_elements);
    build_snapshot(frame, delays.row(pixel), 0, snap.values.data());
    return snap;
}

double das(const DelayedSnapshot& snapshot) {
    return simd::kernels().sum(snapshot.values.data(), snapshot.values.size());
}

double coherence_factor(const DelayedSnapshot& snapshot) {
    const auto& K = simd::kernels();
    const std::size_t m = snapshot.values.size();
    const double num = K.sum(snapshot.values.data(), m);
    const double den = K.sumsq(snapshot.values.data(), m);
    if (!(den > 0.0)) return 0.0;
    // Cauchy-Schwarz bounds CF by 1; clip fp rounding dust at the top.
    return std::min(1.0, (num * num) / (static_cast<double>(m) * den));
}

long pixel_time_index(double axial_m, double sound_speed, double sampling_frequency) {
    return std::lround(axial_m / sound_speed * sampling_frequency);
}

CovarianceEstimate estimate_covariance(const ChannelFrame& frame, const DelayTable& delays,
                                       std::size_t pixel, long k, const MVParams& params) {
    if (pixel >= delays.n_pixels) throw std::invalid_argument("pixel outside grid");
    params.validate(frame.num_elements);
    Scratch s;
    s.prepare(frame.num_elements, params.subarray_length);
    compute_covariance(frame, delays.row(pixel), k, params, s);

    CovarianceEstimate cov;
    cov.dim = params.subarray_length;
    cov.matrix = s.r;
    cov.trace = trace_of(s.r, cov.dim);
    load_covariance(s.r, cov.dim, params.loading_constant * cov.trace, cov.loaded);
    return cov;
}

std::optional<std::vector<double>> mv_weights(const CovarianceEstimate& cov,
                                              const MVParams& params) {
    const int l = cov.dim;
    if (!(cov.trace >= kDegenerateTrace)) return std::nullopt;
    std::vector<double> rhs(l, 1.0), wtilde(l), chol(static_cast<std::size_t>(l) * l, 0.0);
    if (!spd_solve(cov.loaded.data(), static_cast<std::size_t>(l), rhs.data(), wtilde.data(),
                   chol.data()))
        return std::nullopt;
    double wsum = 0.0;
    for (double v : wtilde) wsum += v;
    if (wsum == 0.0 || !std::isfinite(wsum)) return std::nullopt;
    for (double& v : wtilde) v /= wsum;
    (void)params;
    return wtilde;
}

double subarray_average_output(const DelayedSnapshot& snapshot,
                               const std::vector<double>& weights) {
    const int m = static_cast<int>(snapshot.values.size());
    const int l = static_cast<int>(weights.size());
    if (l < 1 || l > m) throw std::invalid_argument("weight length must be in [1, M]");
    const int sub_count = m - l + 1;
    double acc = 0.0;
    for (int sub = 0; sub < sub_count; ++sub) {
        double wx = 0.0;
        for (int j = 0; j < l; ++j) wx += weights[j] * snapshot.values[sub + j];
        acc += wx;
    }
    return acc / static_cast<double>(sub_count);
}

double mv_output(const ChannelFrame& frame, const DelayTable& delays, std::size_t pixel, long k,
                 const MVParams& params) {
    params.validate(frame.num_elements);
    Scratch s;
    s.prepare(frame.num_elements, params.subarray_length);
    PixelOutputs out;
    compute_pixel(frame, delays.row(pixel), k, params, true, s, out);
    return out.mv;
}

double hrcf_from(const DelayedSnapshot& snapshot, double y_mv) {
    const double den =
        simd::kernels().sumsq(snapshot.values.data(), snapshot.values.size());
    if (!(den > 0.0)) return 0.0;
    return static_cast<double>(snapshot.values.size()) * y_mv * y_mv / den;
}

double hrcf(const ChannelFrame& frame, const DelayTable& delays, std::size_t pixel, long k,
            const MVParams& params) {
    params.validate(frame.num_elements);
    Scratch s;
    s.prepare(frame.num_elements, params.subarray_length);
    PixelOutputs out;
    compute_pixel(frame, delays.row(pixel), k, params, true, s, out);
    const double sumsq0 = simd::kernels().sumsq(s.x0.data(), s.x0.size());
    if (!(sumsq0 > 0.0)) return 0.0;
    return static_cast<double>(frame.num_elements) * out.mv * out.mv / sumsq0;
}

std::map<Method, BeamformedImage> beamform_images(
    const ChannelFrame& frame, const DelayTable& delays, const ImagingGrid& grid,
    const std::vector<Method>& methods, const MVParams& params,
    std::optional<double> sound_speed_override, unsigned n_threads) {
    if (methods.empty()) throw std::invalid_argument("no methods requested");
    if (delays.n_pixels != grid.n_pixels())
        throw std::invalid_argument("delay table does not match grid");
    if (delays.num_elements != frame.num_elements)
        throw std::invalid_argument("delay table / frame element mismatch");
    params.validate(frame.num_elements);

    const double c_recon = sound_speed_override.value_or(frame.sound_speed);
    if (!(c_recon > 0.0)) throw std::invalid_argument("sound speed override must be > 0");

    std::map<Method, BeamformedImage> images;
    for (Method m : methods) {
        BeamformedImage img;
        img.grid = grid;
        img.stage = BeamformedImage::Stage::rf;
        img.method = method_label(m);
        img.values.assign(grid.n_pixels(), 0.0);
        images.emplace(m, std::move(img));
    }
    const bool need_mv = images.count(Method::mv) || images.count(Method::mv_cf) ||
                         images.count(Method::das_hrcf);

    BeamformedImage* im_das = images.count(Method::das) ? &images.at(Method::das) : nullptr;
    BeamformedImage* im_das_cf = images.count(Method::das_cf) ? &images.at(Method::das_cf) : nullptr;
    BeamformedImage* im_mv = images.count(Method::mv) ? &images.at(Method::mv) : nullptr;
    BeamformedImage* im_mv_cf = images.count(Method::mv_cf) ? &images.at(Method::mv_cf) : nullptr;
    BeamformedImage* im_hrcf =
        images.count(Method::das_hrcf) ? &images.at(Method::das_hrcf) : nullptr;

    const std::size_t n_lat = grid.n_lateral();
    const double fs = frame.sampling_frequency;

    parallel_for_chunks(0, grid.n_axial(),
        [&](std::size_t r0, std::size_t r1) {
            Scratch s;
            s.prepare(frame.num_elements, params.subarray_length);
            PixelOutputs out;
            for (std::size_t row = r0; row < r1; ++row) {
                const long k = pixel_time_index(grid.axial[row], c_recon, fs);
                for (std::size_t col = 0; col < n_lat; ++col) {
                    const std::size_t p = row * n_lat + col;
                    compute_pixel(frame, delays.row(p), k, params, need_mv, s, out);
                    if (im_das) im_das->values[p] = out.das;
                    if (im_das_cf) im_das_cf->values[p] = out.das_cf;
                    if (im_mv) im_mv->values[p] = out.mv;
                    if (im_mv_cf) im_mv_cf->values[p] = out.mv_cf;
                    if (im_hrcf) im_hrcf->values[p] = out.das_hrcf;
                }
            }
        },
        n_threads);

    return images;
}

BeamformedImage beamform_image(const ChannelFrame& frame, const DelayTable& delays,
                               const ImagingGrid& grid, Method method, const MVParams& params,
                               std::optional<double> sound_speed_override, unsigned n_threads) {
    auto images = beamform_images(frame, delays, grid, {method}, params, sound_speed_override,
                                  n_threads);
    return std::move(images.at(method));
}

}  // namespace pabeam
