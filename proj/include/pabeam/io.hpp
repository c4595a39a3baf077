// File formats: channel-frame binary, 16-bit PGM images, CSV tables.
#pragma once

#include <filesystem>
#include <string>

#include "pabeam/dsp.hpp"
#include "pabeam/metrics.hpp"
#include "pabeam/phantom.hpp"

namespace pabeam {

// Locale-independent shortest-ish decimal formatting used by all CSV output.
std::string format_double(double v);

// Flat little-endian binary: header M (u64), N (u64), fs (f64), c (f64),
// then M*N f64 samples row-major by element.
void write_frame(const ChannelFrame& frame, const std::filesystem::path& path);
ChannelFrame read_frame(const std::filesystem::path& path);

// 16-bit binary PGM (maxval 65535, most significant byte first), mapping
// -dynamic_range dB -> 0 and 0 dB -> 65535, linear in dB. Input must be a
// db-stage image whose floor matches the display range.
void write_pgm16(const BeamformedImage& db_image, double dynamic_range_db,
                 const std::filesystem::path& path);

std::string metrics_csv(const MetricsReport& report);
MetricsReport parse_metrics_csv(const std::string& text);

void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace pabeam
