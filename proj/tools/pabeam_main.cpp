// pabeam: photoacoustic linear-array beamforming experiment runner.
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pabeam/io.hpp"
#include "pabeam/runner.hpp"

namespace {

std::vector<pabeam::Method> parse_methods(const std::string& arg) {
    if (arg == "all") return pabeam::all_methods();
    std::vector<pabeam::Method> out;
    std::stringstream ss(arg);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (!tok.empty()) out.push_back(pabeam::parse_method(tok));
    }
    if (out.empty()) throw std::invalid_argument("no methods given");
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Linear-array photoacoustic beamforming toolkit"};
    app.require_subcommand(1);

    // run
    auto* run = app.add_subcommand("run", "Simulate a scenario and reconstruct images");
    std::string scenario;
    std::string methods_arg = "all";
    std::uint64_t seed = 1;
    std::string out_dir = "out";
    double sos_factor = -1.0;
    int subarray = -1;
    int temporal_k = -1;
    double dl_const = -1.0;
    double dynamic_range = 60.0;
    double grid_step = -1.0;
    unsigned threads = 0;
    bool save_frame = false;
    std::string load_frame;

    run->add_option("scenario", scenario, "Scenario id")->required();
    run->add_option("--methods", methods_arg,
                    "Comma-separated methods (DAS,DAS+CF,MV,MV+CF,DAS+HRCF) or 'all'");
    run->add_option("--seed", seed, "RNG seed for noise and cyst realization");
    run->add_option("--out", out_dir, "Output directory");
    run->add_option("--sos-factor", sos_factor,
                    "Reconstruction sound-speed factor (default per scenario)");
    run->add_option("--subarray", subarray, "MV subarray length L");
    run->add_option("--temporal-k", temporal_k, "MV temporal half-window K");
    run->add_option("--dl-const", dl_const, "MV diagonal-loading constant");
    run->add_option("--dynamic-range", dynamic_range, "Display dynamic range in dB");
    run->add_option("--grid-step", grid_step, "Grid step in meters for both axes");
    run->add_option("--threads", threads, "Worker threads (0 = hardware)");
    run->add_flag("--save-frame", save_frame, "Also write the channel data as frame.bin");
    run->add_option("--load-frame", load_frame,
                    "Beamform a previously exported frame.bin instead of simulating");

    // compare
    auto* compare = app.add_subcommand("compare", "Join metrics across run directories");
    std::vector<std::string> dirs;
    std::string compare_out;
    compare->add_option("dirs", dirs, "Run directories")->required()->expected(-1);
    compare->add_option("--out", compare_out, "Write the comparison CSV here (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            pabeam::RunConfig cfg;
            cfg.scenario = scenario;
            cfg.methods = parse_methods(methods_arg);
            cfg.seed = seed;
            cfg.output_dir = out_dir;
            if (sos_factor > 0.0) cfg.sos_factor = sos_factor;
            if (subarray > 0) cfg.subarray_length = subarray;
            if (temporal_k >= 0) cfg.temporal_half_window = temporal_k;
            if (dl_const > 0.0) cfg.loading_constant = dl_const;
            cfg.dynamic_range_db = dynamic_range;
            if (grid_step > 0.0) cfg.grid_step = grid_step;
            cfg.threads = threads;
            cfg.save_frame = save_frame;
            if (!load_frame.empty()) cfg.load_frame = load_frame;

            const auto result = pabeam::run_scenario(cfg);
            std::cout << "wrote " << result.output_dir.string() << " ("
                      << result.report.rows.size() << " metric rows)\n";
        } else if (compare->parsed()) {
            std::vector<std::filesystem::path> paths(dirs.begin(), dirs.end());
            const std::string csv = pabeam::compare_report(paths);
            if (compare_out.empty()) {
                std::cout << csv;
            } else {
                pabeam::write_text_file(compare_out, csv);
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
