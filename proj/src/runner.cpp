#include "pabeam/runner.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "pabeam/dsp.hpp"
#include "pabeam/io.hpp"

namespace pabeam {

namespace {

using ordered_json = nlohmann::ordered_json;

// Metrics are read off a dB image with a deep floor so that sidelobe levels
// far below the display range stay measurable; PGMs use the display range.
constexpr double kAnalysisRangeDb = 200.0;
constexpr std::size_t kBandRows = 32;

// SNR ROI layout around an on-axis point target (meters).
constexpr double kTargetHalfLateral = 2e-3;
constexpr double kTargetHalfAxial = 1e-3;
constexpr double kBackgroundOffset = 6e-3;   // lateral center offset
constexpr double kBackgroundHalf = 2e-3;     // half side of the 4 mm square
constexpr double kBackgroundClearance = 3e-3;
// Cyst ROI layout, as factors of the cyst radius.
constexpr double kInsideRadiusFactor = 0.75;
constexpr double kAnnulusInnerFactor = 1.25;
constexpr double kAnnulusOuterFactor = 1.6;

int derive_num_samples(const ArrayGeometry& geom, const AcquisitionParams& acq,
                       const ImagingGrid& grid) {
    const double half_aperture = 0.5 * geom.aperture_width();
    const double max_lat = std::max(std::abs(grid.lateral_min), std::abs(grid.lateral_max));
    const double max_r = std::hypot(grid.axial_max, max_lat + half_aperture);
    const double tau = pulse_time_constant(acq);
    return static_cast<int>(std::ceil((max_r / acq.sound_speed + 12.0 * tau) *
                                      acq.sampling_frequency)) + 2;
}

RectROI target_roi(double depth) {
    return {-kTargetHalfLateral, kTargetHalfLateral, depth - kTargetHalfAxial,
            depth + kTargetHalfAxial};
}

RectROI background_roi(double depth) {
    return {kBackgroundOffset - kBackgroundHalf, kBackgroundOffset + kBackgroundHalf,
            depth - kBackgroundHalf, depth + kBackgroundHalf};
}

void check_background_clearance(const RectROI& bg, const Phantom& phantom) {
    for (const PointSource& p : phantom.points) {
        double d = 0.0;
        if (p.lateral < bg.lateral_min) d = bg.lateral_min - p.lateral;
        else if (p.lateral > bg.lateral_max) d = p.lateral - bg.lateral_max;
        if (d < kBackgroundClearance)
            throw std::runtime_error("background ROI too close to a declared source");
    }
}

ordered_json roi_json(const RectROI& r) {
    return {{"lateral_min_m", r.lateral_min},
            {"lateral_max_m", r.lateral_max},
            {"axial_min_m", r.axial_min},
            {"axial_max_m", r.axial_max}};
}

struct ResolvedRun {
    Scenario scenario;
    GeometryConfig geo_cfg;
    ArrayGeometry geom;
    AcquisitionParams acq;
    ImagingGrid grid;
    MVParams mv;
    double sos_factor = 1.0;
    double c_recon = 0.0;
};

ResolvedRun resolve(const RunConfig& config) {
    ResolvedRun r;
    r.scenario = build_scenario(config.scenario, config.seed);

    r.geo_cfg.axial_min = r.scenario.axial_min;
    r.geo_cfg.axial_max = r.scenario.axial_max;
    if (config.grid_step) {
        r.geo_cfg.lateral_step = *config.grid_step;
        r.geo_cfg.axial_step = *config.grid_step;
    }
    if (config.pitch) r.geo_cfg.pitch = *config.pitch;

    {
        // Two passes: the record length depends on the grid extent.
        auto [geom0, acq0, grid0] = build_geometry(r.geo_cfg);
        r.geo_cfg.num_samples = derive_num_samples(geom0, acq0, grid0);
    }
    std::tie(r.geom, r.acq, r.grid) = build_geometry(r.geo_cfg);

    r.mv = MVParams::defaults(r.geom.num_elements);
    if (config.subarray_length) {
        r.mv.subarray_length = *config.subarray_length;
        r.mv.loading_constant = 1.0 / (100.0 * r.mv.subarray_length);
    }
    if (config.temporal_half_window) r.mv.temporal_half_window = *config.temporal_half_window;
    if (config.loading_constant) r.mv.loading_constant = *config.loading_constant;
    r.mv.validate(r.geom.num_elements);

    r.sos_factor = config.sos_factor.value_or(r.scenario.recon_sos_factor);
    if (!(r.sos_factor > 0.0)) throw std::invalid_argument("sos factor must be > 0");
    r.c_recon = r.acq.sound_speed * r.sos_factor;

    if (config.methods.empty()) throw std::invalid_argument("no methods requested");
    if (!(config.dynamic_range_db > 0.0))
        throw std::invalid_argument("dynamic range must be > 0");
    return r;
}

ordered_json build_manifest(const RunConfig& config, const ResolvedRun& r) {
    ordered_json m;
    m["schema"] = "pabeam-run-manifest/1";
    m["scenario"] = config.scenario;
    m["seed"] = config.seed;
    ordered_json methods = ordered_json::array();
    for (Method me : config.methods) methods.push_back(method_label(me));
    m["methods"] = methods;
    m["geometry"] = {{"num_elements", r.geom.num_elements}, {"pitch_m", r.geom.pitch}};
    m["acquisition"] = {{"sampling_frequency_hz", r.acq.sampling_frequency},
                        {"sound_speed_mps", r.acq.sound_speed},
                        {"num_samples", r.acq.num_samples},
                        {"center_frequency_hz", r.acq.center_frequency},
                        {"fractional_bandwidth", r.acq.fractional_bandwidth}};
    m["grid"] = {{"lateral_min_m", r.grid.lateral_min}, {"lateral_max_m", r.grid.lateral_max},
                 {"axial_min_m", r.grid.axial_min},     {"axial_max_m", r.grid.axial_max},
                 {"lateral_step_m", r.grid.lateral_step}, {"axial_step_m", r.grid.axial_step},
                 {"n_lateral", r.grid.n_lateral()},     {"n_axial", r.grid.n_axial()}};
    m["reconstruction"] = {{"sound_speed_factor", r.sos_factor},
                           {"sound_speed_mps", r.c_recon}};
    m["mv"] = {{"subarray_length", r.mv.subarray_length},
               {"temporal_half_window", r.mv.temporal_half_window},
               {"loading_constant", r.mv.loading_constant}};
    m["display"] = {{"dynamic_range_db", config.dynamic_range_db}};
    m["noise"] = {{"snr_db", r.scenario.noise.snr_db}, {"seed", r.scenario.noise.seed}};

    ordered_json points = ordered_json::array();
    for (const PointSource& p : r.scenario.phantom.points)
        points.push_back({{"lateral_m", p.lateral},
                          {"axial_m", p.axial},
                          {"radius_m", p.radius},
                          {"amplitude", p.amplitude}});
    ordered_json cysts = ordered_json::array();
    for (const Cyst& c : r.scenario.phantom.cysts)
        cysts.push_back({{"lateral_m", c.lateral},
                         {"axial_m", c.axial},
                         {"radius_m", c.radius},
                         {"density_per_mm2", c.density_per_mm2},
                         {"amplitude", c.amplitude}});
    m["phantom"] = {{"points", points}, {"cysts", cysts}};

    ordered_json depths = ordered_json::array();
    for (double d : r.scenario.eval_depths) depths.push_back(d * 1e3);
    m["eval_depths_mm"] = depths;

    ordered_json analysis;
    analysis["dynamic_range_db"] = kAnalysisRangeDb;
    if (!r.scenario.phantom.points.empty()) {
        analysis["target_roi_at_first_depth"] = roi_json(target_roi(r.scenario.eval_depths[0]));
        analysis["background_roi_at_first_depth"] =
            roi_json(background_roi(r.scenario.eval_depths[0]));
        analysis["background_clearance_m"] = kBackgroundClearance;
    }
    if (!r.scenario.phantom.cysts.empty()) {
        analysis["inside_radius_factor"] = kInsideRadiusFactor;
        analysis["annulus_inner_factor"] = kAnnulusInnerFactor;
        analysis["annulus_outer_factor"] = kAnnulusOuterFactor;
    }
    m["analysis"] = analysis;
    return m;
}

}  // namespace

RunResult run_scenario(const RunConfig& config) {
    namespace fs = std::filesystem;
    const ResolvedRun r = resolve(config);

    if (config.output_dir.empty()) throw std::invalid_argument("output_dir must be set");
    fs::create_directories(config.output_dir);

    ChannelFrame frame;
    if (config.load_frame) {
        frame = read_frame(*config.load_frame);
        if (frame.num_elements != r.geom.num_elements ||
            frame.num_samples != r.acq.num_samples ||
            frame.sampling_frequency != r.acq.sampling_frequency ||
            frame.sound_speed != r.acq.sound_speed)
            throw std::runtime_error("loaded frame does not match the scenario configuration");
        frame.rng_seed = config.seed;
    } else {
        frame = simulate_channels(r.scenario.phantom, r.geom, r.acq, r.scenario.noise,
                                  config.threads);
    }
    if (config.save_frame) write_frame(frame, config.output_dir / "frame.bin");

    // Banded image formation keeps the delay table small.
    const std::optional<double> sos_override =
        r.sos_factor != 1.0 ? std::optional<double>(r.c_recon) : std::nullopt;
    std::map<Method, BeamformedImage> rf;
    for (Method m : config.methods) {
        BeamformedImage img;
        img.grid = r.grid;
        img.stage = BeamformedImage::Stage::rf;
        img.method = method_label(m);
        img.values.assign(r.grid.n_pixels(), 0.0);
        rf.emplace(m, std::move(img));
    }
    const std::size_t n_lat = r.grid.n_lateral();
    for (std::size_t row0 = 0; row0 < r.grid.n_axial(); row0 += kBandRows) {
        const std::size_t row1 = std::min(r.grid.n_axial(), row0 + kBandRows);
        const ImagingGrid band = r.grid.slice_rows(row0, row1);
        const DelayTable delays = compute_delay_table(r.geom, r.acq, band, sos_override);
        auto band_images = beamform_images(frame, delays, band, config.methods, r.mv,
                                           std::optional<double>(r.c_recon), config.threads);
        for (auto& [m, img] : band_images)
            std::copy(img.values.begin(), img.values.end(),
                      rf.at(m).values.begin() + row0 * n_lat);
    }

    // Display chain + metrics per method.
    MetricsReport report;
    std::ostringstream profiles;
    profiles << "scenario,method,depth_mm,lateral_mm,value_db\n";

    for (Method m : config.methods) {
        const BeamformedImage env = envelope(rf.at(m), config.threads);
        const BeamformedImage db_display =
            log_compress(env, DisplayParams{config.dynamic_range_db});
        const BeamformedImage db_analysis = log_compress(env, DisplayParams{kAnalysisRangeDb});
        write_pgm16(db_display, config.dynamic_range_db,
                    config.output_dir / (method_file_stem(m) + ".pgm"));

        for (double depth : r.scenario.eval_depths) {
            const LateralProfile prof = extract_profile(db_analysis, depth);
            for (std::size_t i = 0; i < prof.lateral.size(); ++i)
                profiles << config.scenario << ',' << method_label(m) << ','
                         << format_double(depth * 1e3) << ','
                         << format_double(prof.lateral[i] * 1e3) << ','
                         << format_double(prof.values_db[i]) << '\n';

            MetricsRow row;
            row.method = method_label(m);
            row.scenario = config.scenario;
            row.target_depth_mm = depth * 1e3;
            if (!r.scenario.phantom.points.empty()) {
                row.fwhm_um = fwhm_minus6db(prof);
                row.sidelobe_db = sidelobe_level(prof);
                const RectROI bg = background_roi(depth);
                check_background_clearance(bg, r.scenario.phantom);
                row.snr_db = snr(env, target_roi(depth), bg);
            }
            if (!r.scenario.phantom.cysts.empty()) {
                for (const Cyst& c : r.scenario.phantom.cysts) {
                    if (c.axial != depth) continue;
                    DiskROI inside{c.lateral, c.axial, kInsideRadiusFactor * c.radius};
                    AnnulusROI outside;
                    outside.lateral = c.lateral;
                    outside.axial = c.axial;
                    outside.inner_radius = kAnnulusInnerFactor * c.radius;
                    outside.outer_radius = kAnnulusOuterFactor * c.radius;
                    for (const Cyst& other : r.scenario.phantom.cysts) {
                        if (&other == &c) continue;
                        outside.exclusions.push_back(
                            {other.lateral, other.axial, kAnnulusInnerFactor * other.radius});
                    }
                    row.cr_db = contrast_ratio(env, inside, outside);
                }
            }
            report.rows.push_back(std::move(row));
        }
    }

    write_text_file(config.output_dir / "metrics.csv", metrics_csv(report));
    write_text_file(config.output_dir / "profiles.csv", profiles.str());
    write_text_file(config.output_dir / "manifest.json",
                    build_manifest(config, r).dump(2) + "\n");

    return RunResult{std::move(report), config.output_dir};
}

std::string compare_report(const std::vector<std::filesystem::path>& run_dirs) {
    if (run_dirs.empty()) throw std::invalid_argument("compare needs at least one run dir");

    struct Entry {
        std::string run;
        MetricsRow row;
    };
    std::vector<Entry> entries;
    ordered_json ref_grid;

    for (const auto& dir : run_dirs) {
        const auto manifest_path = dir / "manifest.json";
        const auto metrics_path = dir / "metrics.csv";
        if (!std::filesystem::exists(manifest_path))
            throw std::runtime_error("missing manifest: " + manifest_path.string());
        if (!std::filesystem::exists(metrics_path))
            throw std::runtime_error("missing metrics: " + metrics_path.string());
        const auto manifest = ordered_json::parse(read_text_file(manifest_path));
        if (!manifest.contains("grid"))
            throw std::runtime_error("manifest has no grid section: " + manifest_path.string());
        if (ref_grid.is_null()) {
            ref_grid = manifest["grid"];
        } else if (manifest["grid"] != ref_grid) {
            throw std::runtime_error("mismatched grids across runs");
        }
        const MetricsReport rep = parse_metrics_csv(read_text_file(metrics_path));
        for (const MetricsRow& row : rep.rows)
            entries.push_back({dir.filename().string(), row});
    }

    // Rank within (scenario, depth) groups; rank 1 is best (smallest FWHM and
    // sidelobe, largest SNR and CR).
    struct Key {
        std::string scenario;
        double depth;
        bool operator<(const Key& o) const {
            return scenario != o.scenario ? scenario < o.scenario : depth < o.depth;
        }
    };
    auto ranks_for = [&](auto getter, bool smaller_is_better) {
        std::map<Key, std::vector<std::pair<double, std::size_t>>> groups;
        for (std::size_t i = 0; i < entries.size(); ++i) {
            const auto val = getter(entries[i].row);
            if (!val) continue;
            groups[{entries[i].row.scenario, entries[i].row.target_depth_mm}].push_back(
                {*val, i});
        }
        std::vector<std::optional<int>> rank(entries.size());
        std::vector<std::optional<double>> best(entries.size());
        for (auto& [key, vals] : groups) {
            std::sort(vals.begin(), vals.end(), [&](const auto& a, const auto& b) {
                return smaller_is_better ? a.first < b.first : a.first > b.first;
            });
            for (std::size_t pos = 0; pos < vals.size(); ++pos) {
                rank[vals[pos].second] = static_cast<int>(pos) + 1;
                best[vals[pos].second] = vals[0].first;
            }
        }
        return std::pair(rank, best);
    };

    auto [fwhm_rank, fwhm_best] =
        ranks_for([](const MetricsRow& r) { return r.fwhm_um; }, true);
    auto [snr_rank, snr_best] = ranks_for([](const MetricsRow& r) { return r.snr_db; }, false);
    auto [cr_rank, cr_best] = ranks_for([](const MetricsRow& r) { return r.cr_db; }, false);
    auto [sl_rank, sl_best] =
        ranks_for([](const MetricsRow& r) { return r.sidelobe_db; }, true);

    std::ostringstream os;
    os << "run,scenario,method,target_depth_mm,"
          "fwhm_um,fwhm_rank,fwhm_ratio_vs_best,"
          "snr_db,snr_rank,snr_delta_vs_best_db,"
          "cr_db,cr_rank,cr_delta_vs_best_db,"
          "sidelobe_db,sidelobe_rank,sidelobe_delta_vs_best_db\n";
    auto cell = [](const std::optional<double>& v) { return v ? format_double(*v) : "NA"; };
    auto rank_cell = [](const std::optional<int>& v) {
        return v ? std::to_string(*v) : std::string("NA");
    };
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const MetricsRow& row = entries[i].row;
        std::optional<double> fwhm_ratio, snr_delta, cr_delta, sl_delta;
        if (row.fwhm_um && fwhm_best[i] && *fwhm_best[i] > 0.0)
            fwhm_ratio = *row.fwhm_um / *fwhm_best[i];
        if (row.snr_db && snr_best[i]) snr_delta = *row.snr_db - *snr_best[i];
        if (row.cr_db && cr_best[i]) cr_delta = *row.cr_db - *cr_best[i];
        if (row.sidelobe_db && sl_best[i]) sl_delta = *row.sidelobe_db - *sl_best[i];
        os << entries[i].run << ',' << row.scenario << ',' << row.method << ','
           << format_double(row.target_depth_mm) << ',' << cell(row.fwhm_um) << ','
           << rank_cell(fwhm_rank[i]) << ',' << cell(fwhm_ratio) << ',' << cell(row.snr_db)
           << ',' << rank_cell(snr_rank[i]) << ',' << cell(snr_delta) << ',' << cell(row.cr_db)
           << ',' << rank_cell(cr_rank[i]) << ',' << cell(cr_delta) << ','
           << cell(row.sidelobe_db) << ',' << rank_cell(sl_rank[i]) << ','
           << cell(sl_delta) << '\n';
    }
    return os.str();
}

}  // namespace pabeam
