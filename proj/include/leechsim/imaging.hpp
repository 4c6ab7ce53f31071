#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "leechsim/engine.hpp"
#include "leechsim/floorplan.hpp"
#include "leechsim/metrics.hpp"

namespace leechsim {

struct Rgb {
    std::uint8_t r = 0, g = 0, b = 0;

    bool operator==(const Rgb&) const = default;
};

// Visit-time colormap over normalized time in [0,1]: full-intensity stops
// blue -> cyan -> yellow -> red at equally spaced knots, linear in between,
// channels rounded half-up.
Rgb time_color(double t);

struct Image {
    int width = 0;
    int height = 0;
    std::vector<Rgb> pixels;

    Rgb at(int x, int y) const { return pixels[static_cast<size_t>(y) * width + x]; }
    void set(int x, int y, Rgb c) { pixels[static_cast<size_t>(y) * width + x] = c; }
};

struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;

    std::uint8_t at(int x, int y) const { return pixels[static_cast<size_t>(y) * width + x]; }
};

inline constexpr Rgb kDefaultWallColor{128, 128, 128};

// Paint each visited cell with the color of its latest visit time, normalized
// by the trajectory duration (a zero-length trajectory normalizes to 1).
// Walls take `wall_color`, unvisited open cells stay white. Output is the
// plan raster magnified by the integer `zoom`.
Image render_overlay(const Trajectory& trajectory, const FloorPlan& plan, int zoom = 1,
                     Rgb wall_color = kDefaultWallColor);

// Frequency matrix as 8-bit gray, max-normalized: zero frequency is white,
// the maximum is black.
GrayImage frequency_image(const FrequencyMatrix& fm);

// Threshold mask as 8-bit gray: masked cells black on white.
GrayImage threshold_image(const ThresholdMap& map);

// One video frame; 1 (grayscale) or 3 (RGB) channels, row-major.
struct Frame {
    int width = 0;
    int height = 0;
    int channels = 1;
    std::vector<std::uint8_t> data;

    std::uint8_t channel(int x, int y, int c) const {
        return data[(static_cast<size_t>(y) * width + x) * channels + c];
    }
};

struct FrameSequence {
    std::vector<Frame> frames;
    double fps = 25.0;
};

enum class DarknessTest : std::uint8_t {
    PerChannel,  // every channel below the threshold
    Luminance,   // Rec.601 luma below the threshold
};

// Blob-centroid tracking: sample every round(fps/sample_rate)-th frame, take
// the centroid of its dark pixels as the position (rounded to the nearest
// pixel), carry the previous position through dark-pixel-free frames. Sample
// steps count at the sampling rate; modes are unknown.
Trajectory extract_trace(const FrameSequence& frames, int darkness_threshold, double sample_rate,
                         DarknessTest test = DarknessTest::PerChannel);

// Binary PPM/PGM (P6/P5) and minimal PNG output; PNM decoding for frame
// ingestion.
std::string encode_ppm(const Image& img);
std::string encode_pgm(const GrayImage& img);
Frame decode_pnm(const std::string& bytes);
std::vector<std::uint8_t> encode_png(const Image& img);
std::vector<std::uint8_t> encode_png(const GrayImage& img);

// Frames read from a directory of .ppm/.pgm files in lexicographic order.
FrameSequence load_frame_dir(const std::string& dir, double fps);

}  // namespace leechsim
