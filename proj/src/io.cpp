#include "pabeam/io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace pabeam {

namespace {

static_assert(std::endian::native == std::endian::little,
              "frame binary I/O assumes a little-endian host");

void put_u64(std::ostream& os, std::uint64_t v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

void put_f64(std::ostream& os, double v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint64_t get_u64(std::istream& is) {
    std::uint64_t v = 0;
    is.read(reinterpret_cast<char*>(&v), sizeof v);
    return v;
}

double get_f64(std::istream& is) {
    double v = 0.0;
    is.read(reinterpret_cast<char*>(&v), sizeof v);
    return v;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    return out;
}

std::string cell(const std::optional<double>& v) { return v ? format_double(*v) : "NA"; }

std::optional<double> parse_cell(const std::string& s) {
    if (s == "NA" || s.empty()) return std::nullopt;
    double v = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
        throw std::invalid_argument("bad numeric cell: " + s);
    return v;
}

}  // namespace

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    std::array<char, 64> buf{};
    auto [p, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v,
                                 std::chars_format::general, 12);
    if (ec != std::errc()) throw std::runtime_error("format_double failed");
    return std::string(buf.data(), p);
}

void write_frame(const ChannelFrame& frame, const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + path.string());
    put_u64(os, static_cast<std::uint64_t>(frame.num_elements));
    put_u64(os, static_cast<std::uint64_t>(frame.num_samples));
    put_f64(os, frame.sampling_frequency);
    put_f64(os, frame.sound_speed);
    os.write(reinterpret_cast<const char*>(frame.samples.data()),
             static_cast<std::streamsize>(frame.samples.size() * sizeof(double)));
    if (!os) throw std::runtime_error("write failed: " + path.string());
}

ChannelFrame read_frame(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open for reading: " + path.string());
    ChannelFrame f;
    const auto m = get_u64(is);
    const auto n = get_u64(is);
    f.sampling_frequency = get_f64(is);
    f.sound_speed = get_f64(is);
    if (!is || m == 0 || n == 0 || m > (1u << 20) || n > (1u << 28))
        throw std::runtime_error("corrupt frame header: " + path.string());
    f.num_elements = static_cast<int>(m);
    f.num_samples = static_cast<int>(n);
    f.samples.resize(m * n);
    is.read(reinterpret_cast<char*>(f.samples.data()),
            static_cast<std::streamsize>(f.samples.size() * sizeof(double)));
    if (!is) throw std::runtime_error("truncated frame file: " + path.string());
    return f;
}

void write_pgm16(const BeamformedImage& db_image, double dynamic_range_db,
                 const std::filesystem::path& path) {
    if (db_image.stage != BeamformedImage::Stage::db)
        throw std::invalid_argument("write_pgm16 expects a db-stage image");
    const std::size_t w = db_image.grid.n_lateral();
    const std::size_t h = db_image.grid.n_axial();
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + path.string());
    os << "P5\n" << w << " " << h << "\n65535\n";
    std::vector<unsigned char> rowbuf(w * 2);
    for (std::size_t r = 0; r < h; ++r) {
        for (std::size_t c = 0; c < w; ++c) {
            double t = (db_image.values[r * w + c] + dynamic_range_db) / dynamic_range_db;
            if (t < 0.0) t = 0.0;
            if (t > 1.0) t = 1.0;
            const auto v = static_cast<std::uint16_t>(std::lround(t * 65535.0));
            rowbuf[2 * c] = static_cast<unsigned char>(v >> 8);  // MSB first per PGM
            rowbuf[2 * c + 1] = static_cast<unsigned char>(v & 0xff);
        }
        os.write(reinterpret_cast<const char*>(rowbuf.data()),
                 static_cast<std::streamsize>(rowbuf.size()));
    }
    if (!os) throw std::runtime_error("write failed: " + path.string());
}

std::string metrics_csv(const MetricsReport& report) {
    std::ostringstream os;
    os << "method,scenario,target_depth_mm,fwhm_um,snr_db,cr_db,sidelobe_db\n";
    for (const MetricsRow& r : report.rows) {
        os << r.method << ',' << r.scenario << ',' << format_double(r.target_depth_mm) << ','
           << cell(r.fwhm_um) << ',' << cell(r.snr_db) << ',' << cell(r.cr_db) << ','
           << cell(r.sidelobe_db) << '\n';
    }
    return os.str();
}

MetricsReport parse_metrics_csv(const std::string& text) {
    MetricsReport rep;
    std::istringstream is(text);
    std::string line;
    bool header = true;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (header) {
            header = false;
            continue;
        }
        const auto cells = split_csv_line(line);
        if (cells.size() != 7) throw std::invalid_argument("bad metrics CSV row: " + line);
        MetricsRow r;
        r.method = cells[0];
        r.scenario = cells[1];
        const auto depth = parse_cell(cells[2]);
        if (!depth) throw std::invalid_argument("missing depth in metrics CSV");
        r.target_depth_mm = *depth;
        r.fwhm_um = parse_cell(cells[3]);
        r.snr_db = parse_cell(cells[4]);
        r.cr_db = parse_cell(cells[5]);
        r.sidelobe_db = parse_cell(cells[6]);
        rep.rows.push_back(std::move(r));
    }
    return rep;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + path.string());
    os.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!os) throw std::runtime_error("write failed: " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open for reading: " + path.string());
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

}  // namespace pabeam
