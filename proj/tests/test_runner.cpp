#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "pabeam/io.hpp"
#include "pabeam/runner.hpp"

using namespace pabeam;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("pabeam_run_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

RunConfig coarse_cysts_config(const fs::path& out) {
    RunConfig cfg;
    cfg.scenario = "cysts-40db";
    cfg.seed = 7;
    cfg.output_dir = out;
    cfg.grid_step = 0.5e-3;  // coarse grid keeps the unit test quick
    return cfg;
}

}  // namespace

TEST_CASE("run_scenario writes the full artifact set and is deterministic") {
    TempDir tmp;
    auto cfg1 = coarse_cysts_config(tmp.path / "a");
    auto cfg2 = coarse_cysts_config(tmp.path / "b");
    cfg1.threads = 1;
    cfg2.threads = 2;  // thread count must not change any output byte

    const auto r1 = run_scenario(cfg1);
    const auto r2 = run_scenario(cfg2);

    const std::vector<std::string> files = {"das.pgm",   "das_cf.pgm",   "mv.pgm",
                                            "mv_cf.pgm", "das_hrcf.pgm", "metrics.csv",
                                            "profiles.csv", "manifest.json"};
    for (const auto& f : files) {
        REQUIRE(fs::exists(cfg1.output_dir / f));
        CHECK(read_text_file(cfg1.output_dir / f) == read_text_file(cfg2.output_dir / f));
    }

    // CR defined for both cysts, per method.
    int cr_rows = 0;
    for (const auto& row : r1.report.rows)
        if (row.cr_db) ++cr_rows;
    CHECK(cr_rows == 2 * 5);
    CHECK(r2.report.rows.size() == r1.report.rows.size());
}

TEST_CASE("saved frames can be re-beamformed to identical artifacts") {
    TempDir tmp;
    auto cfg1 = coarse_cysts_config(tmp.path / "a");
    cfg1.save_frame = true;
    run_scenario(cfg1);
    REQUIRE(fs::exists(cfg1.output_dir / "frame.bin"));

    auto cfg2 = coarse_cysts_config(tmp.path / "b");
    cfg2.load_frame = cfg1.output_dir / "frame.bin";
    run_scenario(cfg2);

    CHECK(read_text_file(cfg1.output_dir / "metrics.csv") ==
          read_text_file(cfg2.output_dir / "metrics.csv"));
    CHECK(read_text_file(cfg1.output_dir / "das_hrcf.pgm") ==
          read_text_file(cfg2.output_dir / "das_hrcf.pgm"));
}

TEST_CASE("manifest records the parameters that shape the output") {
    TempDir tmp;
    auto cfg = coarse_cysts_config(tmp.path / "a");
    cfg.subarray_length = 32;
    run_scenario(cfg);
    const auto manifest = read_text_file(cfg.output_dir / "manifest.json");
    for (const char* key :
         {"\"scenario\"", "\"seed\"", "\"grid\"", "\"mv\"", "\"subarray_length\": 32",
          "\"noise\"", "\"phantom\"", "\"sound_speed_factor\"", "\"dynamic_range_db\"",
          "\"num_samples\"", "\"pitch_m\""})
        CHECK(manifest.find(key) != std::string::npos);
}

TEST_CASE("sos-error scenario records the 1.05 factor") {
    TempDir tmp;
    RunConfig cfg;
    cfg.scenario = "points-sos-error";
    cfg.seed = 3;
    cfg.output_dir = tmp.path / "sos";
    cfg.grid_step = 1e-3;
    cfg.methods = {Method::das};
    run_scenario(cfg);
    const auto manifest = read_text_file(cfg.output_dir / "manifest.json");
    CHECK(manifest.find("\"sound_speed_factor\": 1.05") != std::string::npos);
}

TEST_CASE("run_scenario rejects bad configs") {
    TempDir tmp;
    RunConfig cfg;
    cfg.scenario = "no-such-scenario";
    cfg.output_dir = tmp.path / "x";
    CHECK_THROWS(run_scenario(cfg));

    cfg = coarse_cysts_config(tmp.path / "y");
    cfg.methods.clear();
    CHECK_THROWS(run_scenario(cfg));

    cfg = coarse_cysts_config(tmp.path / "z");
    cfg.subarray_length = 4096;
    CHECK_THROWS(run_scenario(cfg));
}

TEST_CASE("compare: passthrough, ranks, and grid mismatch detection") {
    TempDir tmp;
    auto cfg1 = coarse_cysts_config(tmp.path / "a");
    run_scenario(cfg1);

    const std::string single = compare_report({cfg1.output_dir});
    CHECK(single.find("run,scenario,method,target_depth_mm") == 0);
    CHECK(single.find("DAS+HRCF") != std::string::npos);
    CHECK(single.find(",cysts-40db,") != std::string::npos);

    // Second run with a different seed: comparable grid, joined rows.
    auto cfg2 = coarse_cysts_config(tmp.path / "b");
    cfg2.seed = 8;
    run_scenario(cfg2);
    const std::string joined = compare_report({cfg1.output_dir, cfg2.output_dir});
    CHECK(joined.find("\na,cysts-40db,") != std::string::npos);
    CHECK(joined.find("\nb,cysts-40db,") != std::string::npos);
    CHECK(std::count(joined.begin(), joined.end(), '\n') ==
          2 * std::count(single.begin(), single.end(), '\n') - 1);

    // Mismatched grid is an error.
    auto cfg3 = coarse_cysts_config(tmp.path / "c");
    cfg3.grid_step = 0.4e-3;
    run_scenario(cfg3);
    CHECK_THROWS(compare_report({cfg1.output_dir, cfg3.output_dir}));

    CHECK_THROWS(compare_report({tmp.path / "missing"}));
}
