#include "leechsim/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <zlib.h>

namespace leechsim {

namespace {

constexpr int kNumStops = 4;
constexpr Rgb kStops[kNumStops] = {
    {0, 0, 255},    // start: blue
    {0, 255, 255},  // cyan
    {255, 255, 0},  // yellow
    {255, 0, 0},    // end: red
};

std::uint8_t round_half_up(double v) {
    return static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
}

}  // namespace

Rgb time_color(double t) {
    if (!(t >= 0.0 && t <= 1.0)) throw ArgumentError("time_color: t must be in [0,1]");
    // Knots are equally spaced, so the segment-local coordinate is exact.
    int seg = std::min(kNumStops - 2, static_cast<int>(t * (kNumStops - 1)));
    double u = t * (kNumStops - 1) - seg;
    const Rgb& a = kStops[seg];
    const Rgb& b = kStops[seg + 1];
    return {round_half_up(a.r + (b.r - a.r) * u), round_half_up(a.g + (b.g - a.g) * u),
            round_half_up(a.b + (b.b - a.b) * u)};
}

Image render_overlay(const Trajectory& trajectory, const FloorPlan& plan, int zoom,
                     Rgb wall_color) {
    if (trajectory.samples.empty()) throw ArgumentError("cannot render an empty trajectory");
    if (zoom < 1) throw ArgumentError("zoom must be a positive integer");

    // Latest visit step per cell.
    std::map<Cell, int> latest;
    for (const TrajectorySample& s : trajectory.samples) {
        if (!plan.in_bounds(s.pos.x, s.pos.y) || !plan.is_open(s.pos))
            throw ArgumentError("trajectory sample at step " + std::to_string(s.step) +
                                " is not on an open cell of the plan");
        latest[s.pos] = s.step;
    }

    int duration = trajectory.samples.back().step;
    Image base{plan.width, plan.height,
               std::vector<Rgb>(static_cast<size_t>(plan.width) * plan.height, Rgb{255, 255, 255})};
    for (int y = 0; y < plan.height; ++y)
        for (int x = 0; x < plan.width; ++x)
            if (plan.kind(x, y) == CellKind::Wall) base.set(x, y, wall_color);
    for (const auto& [cell, step] : latest) {
        double t = duration > 0 ? static_cast<double>(step) / duration : 1.0;
        base.set(cell.x, cell.y, time_color(t));
    }

    if (zoom == 1) return base;
    Image out{plan.width * zoom, plan.height * zoom,
              std::vector<Rgb>(static_cast<size_t>(plan.width) * zoom * plan.height * zoom)};
    for (int y = 0; y < out.height; ++y)
        for (int x = 0; x < out.width; ++x)
            out.set(x, y, base.at(x / zoom, y / zoom));
    return out;
}

GrayImage frequency_image(const FrequencyMatrix& fm) {
    GrayImage img{fm.width, fm.height, std::vector<std::uint8_t>(fm.f.size(), 255)};
    double fmax = *std::max_element(fm.f.begin(), fm.f.end());
    if (fmax <= 0.0) return img;
    for (size_t i = 0; i < fm.f.size(); ++i)
        img.pixels[i] = static_cast<std::uint8_t>(255 - round_half_up(255.0 * fm.f[i] / fmax));
    return img;
}

GrayImage threshold_image(const ThresholdMap& map) {
    GrayImage img{map.width, map.height, std::vector<std::uint8_t>(map.mask.size(), 255)};
    for (size_t i = 0; i < map.mask.size(); ++i)
        if (map.mask[i]) img.pixels[i] = 0;
    return img;
}

Trajectory extract_trace(const FrameSequence& seq, int darkness_threshold, double sample_rate,
                         DarknessTest test) {
    if (darkness_threshold <= 0 || darkness_threshold >= 255)
        throw ArgumentError("darkness threshold must be in (0,255)");
    if (!(sample_rate > 0.0) || sample_rate > seq.fps)
        throw ArgumentError("sample rate must be positive and at most the frame rate");
    if (seq.frames.empty()) throw ArgumentError("frame sequence is empty");

    int stride = std::max(1, static_cast<int>(std::lround(seq.fps / sample_rate)));

    auto is_dark = [&](const Frame& f, int x, int y) {
        if (f.channels == 1) return f.channel(x, y, 0) < darkness_threshold;
        int r = f.channel(x, y, 0), g = f.channel(x, y, 1), b = f.channel(x, y, 2);
        if (test == DarknessTest::PerChannel)
            return r < darkness_threshold && g < darkness_threshold && b < darkness_threshold;
        double luma = 0.299 * r + 0.587 * g + 0.114 * b;
        return luma < darkness_threshold;
    };

    Trajectory traj;
    Cell prev{0, 0};
    bool have_prev = false;
    int sample_index = 0;
    for (size_t fi = 0; fi < seq.frames.size(); fi += static_cast<size_t>(stride)) {
        const Frame& f = seq.frames[fi];
        long sum_x = 0, sum_y = 0, n = 0;
        for (int y = 0; y < f.height; ++y)
            for (int x = 0; x < f.width; ++x)
                if (is_dark(f, x, y)) {
                    sum_x += x;
                    sum_y += y;
                    ++n;
                }
        Cell pos;
        if (n > 0) {
            pos = {static_cast<int>(std::lround(static_cast<double>(sum_x) / n)),
                   static_cast<int>(std::lround(static_cast<double>(sum_y) / n))};
        } else if (have_prev) {
            pos = prev;  // subject briefly lost; hold the last fix
        } else {
            throw ExtractionError("no dark pixels in the first sampled frame");
        }
        traj.samples.push_back({sample_index, pos, std::nullopt});
        prev = pos;
        have_prev = true;
        ++sample_index;
    }
    traj.outcome = OutcomeKind::TimedOut;
    traj.end_step = traj.samples.back().step;
    return traj;
}

std::string encode_ppm(const Image& img) {
    std::ostringstream out;
    out << "P6\n" << img.width << " " << img.height << "\n255\n";
    for (const Rgb& p : img.pixels) {
        out.put(static_cast<char>(p.r));
        out.put(static_cast<char>(p.g));
        out.put(static_cast<char>(p.b));
    }
    return out.str();
}

std::string encode_pgm(const GrayImage& img) {
    std::ostringstream out;
    out << "P5\n" << img.width << " " << img.height << "\n255\n";
    for (std::uint8_t p : img.pixels) out.put(static_cast<char>(p));
    return out.str();
}

namespace {

// PNM header tokenizer: whitespace-separated tokens, '#' comments to end of line.
struct PnmReader {
    const std::string& bytes;
    size_t pos = 0;

    std::string token() {
        while (pos < bytes.size()) {
            char c = bytes[pos];
            if (c == '#') {
                while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos;
            } else {
                break;
            }
        }
        size_t start = pos;
        while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
        if (start == pos) throw FormatError("truncated PNM header");
        return bytes.substr(start, pos - start);
    }
};

}  // namespace

Frame decode_pnm(const std::string& bytes) {
    PnmReader reader{bytes};
    std::string magic = reader.token();
    int channels;
    if (magic == "P5")
        channels = 1;
    else if (magic == "P6")
        channels = 3;
    else
        throw FormatError("unsupported PNM magic '" + magic + "' (want binary P5 or P6)");

    Frame frame;
    frame.channels = channels;
    try {
        frame.width = std::stoi(reader.token());
        frame.height = std::stoi(reader.token());
        int maxval = std::stoi(reader.token());
        if (maxval != 255) throw FormatError("only maxval 255 PNM images are supported");
    } catch (const std::invalid_argument&) {
        throw FormatError("bad PNM header field");
    } catch (const std::out_of_range&) {
        throw FormatError("bad PNM header field");
    }
    if (frame.width <= 0 || frame.height <= 0) throw FormatError("bad PNM dimensions");

    size_t need = static_cast<size_t>(frame.width) * frame.height * channels;
    size_t data_at = reader.pos + 1;  // single whitespace byte after maxval
    if (bytes.size() < data_at + need) throw FormatError("truncated PNM pixel data");
    frame.data.assign(bytes.begin() + static_cast<long>(data_at),
                      bytes.begin() + static_cast<long>(data_at + need));
    return frame;
}

namespace {

void png_append_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

void png_append_chunk(std::vector<std::uint8_t>& out, const char type[4],
                      const std::vector<std::uint8_t>& payload) {
    png_append_u32(out, static_cast<std::uint32_t>(payload.size()));
    size_t crc_start = out.size();
    out.insert(out.end(), type, type + 4);
    out.insert(out.end(), payload.begin(), payload.end());
    std::uint32_t crc = static_cast<std::uint32_t>(
        ::crc32(0, out.data() + crc_start, static_cast<uInt>(out.size() - crc_start)));
    png_append_u32(out, crc);
}

// 8-bit PNG, color type 0 (gray) or 2 (RGB), filter 0 on every scanline,
// zlib-deflated in one IDAT chunk.
std::vector<std::uint8_t> encode_png_impl(int width, int height, int channels,
                                          const std::uint8_t* pixels) {
    std::vector<std::uint8_t> raw;
    raw.reserve(static_cast<size_t>(height) * (1 + static_cast<size_t>(width) * channels));
    for (int y = 0; y < height; ++y) {
        raw.push_back(0);  // filter: none
        const std::uint8_t* row = pixels + static_cast<size_t>(y) * width * channels;
        raw.insert(raw.end(), row, row + static_cast<size_t>(width) * channels);
    }

    uLongf compressed_size = ::compressBound(static_cast<uLong>(raw.size()));
    std::vector<std::uint8_t> compressed(compressed_size);
    if (::compress2(compressed.data(), &compressed_size, raw.data(),
                    static_cast<uLong>(raw.size()), 9) != Z_OK)
        throw std::runtime_error("PNG deflate failed");
    compressed.resize(compressed_size);

    std::vector<std::uint8_t> out = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    std::vector<std::uint8_t> ihdr;
    png_append_u32(ihdr, static_cast<std::uint32_t>(width));
    png_append_u32(ihdr, static_cast<std::uint32_t>(height));
    ihdr.push_back(8);                                       // bit depth
    ihdr.push_back(channels == 3 ? 2 : 0);                   // color type
    ihdr.push_back(0);                                       // compression
    ihdr.push_back(0);                                       // filter method
    ihdr.push_back(0);                                       // no interlace
    png_append_chunk(out, "IHDR", ihdr);
    png_append_chunk(out, "IDAT", compressed);
    png_append_chunk(out, "IEND", {});
    return out;
}

}  // namespace

std::vector<std::uint8_t> encode_png(const Image& img) {
    return encode_png_impl(img.width, img.height, 3,
                           reinterpret_cast<const std::uint8_t*>(img.pixels.data()));
}

std::vector<std::uint8_t> encode_png(const GrayImage& img) {
    return encode_png_impl(img.width, img.height, 1, img.pixels.data());
}

FrameSequence load_frame_dir(const std::string& dir, double fps) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) throw ArgumentError("frame directory '" + dir + "' not found");

    std::vector<std::string> paths;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        std::string ext = entry.path().extension().string();
        if (ext == ".ppm" || ext == ".pgm" || ext == ".pnm") paths.push_back(entry.path().string());
    }
    if (paths.empty()) throw ArgumentError("no .ppm/.pgm frames in '" + dir + "'");
    std::sort(paths.begin(), paths.end());

    FrameSequence seq;
    seq.fps = fps;
    for (const std::string& path : paths) {
        std::ifstream in(path, std::ios::binary);
        std::ostringstream buf;
        buf << in.rdbuf();
        Frame f = decode_pnm(buf.str());
        if (!seq.frames.empty() &&
            (f.width != seq.frames[0].width || f.height != seq.frames[0].height))
            throw FormatError("frame '" + path + "' dimensions differ from the first frame");
        seq.frames.push_back(std::move(f));
    }
    return seq;
}

}  // namespace leechsim
