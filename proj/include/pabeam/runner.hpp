// Experiment runner: phantom -> simulate -> beamform -> display -> metrics,
// with all artifacts written to an output directory.
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pabeam/beamform.hpp"
#include "pabeam/metrics.hpp"
#include "pabeam/phantom.hpp"

namespace pabeam {

struct RunConfig {
    std::string scenario;
    std::vector<Method> methods = all_methods();
    std::uint64_t seed = 1;
    std::filesystem::path output_dir;

    // Optional overrides; defaults come from the scenario definition.
    std::optional<double> sos_factor;
    std::optional<int> subarray_length;
    std::optional<int> temporal_half_window;
    std::optional<double> loading_constant;
    double dynamic_range_db = 60.0;
    std::optional<double> grid_step;  // both axes, meters
    std::optional<double> pitch;      // meters
    unsigned threads = 0;

    bool save_frame = false;
    std::optional<std::filesystem::path> load_frame;
};

struct RunResult {
    MetricsReport report;
    std::filesystem::path output_dir;
};

// Writes per-method dB images (16-bit PGM), lateral profiles (CSV), the
// metrics report (CSV) and a manifest (JSON) into config.output_dir.
// Deterministic for a given config + seed. Throws on invalid configs.
RunResult run_scenario(const RunConfig& config);

// Joined metrics across run directories with per-depth ranks and ratios.
// Throws when manifests are missing or grids are incompatible.
std::string compare_report(const std::vector<std::filesystem::path>& run_dirs);

}  // namespace pabeam
