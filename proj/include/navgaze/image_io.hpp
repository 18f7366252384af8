#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace navgaze {

struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;

  GrayImage() = default;
  GrayImage(int w, int h, std::uint8_t fill = 0)
      : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {}
  std::uint8_t& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
  [[nodiscard]] std::uint8_t at(int x, int y) const {
    return data[static_cast<std::size_t>(y) * width + x];
  }
};

using Rgb = std::array<std::uint8_t, 3>;

struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;  // interleaved RGB, row-major

  RgbImage() = default;
  RgbImage(int w, int h, Rgb fill = {0, 0, 0});
  void set(int x, int y, Rgb c);
  [[nodiscard]] Rgb get(int x, int y) const;
};

/// Binary P5 / P6.
void write_pgm(std::ostream& out, const GrayImage& img);
void write_ppm(std::ostream& out, const RgbImage& img);
std::string encode_ppm(const RgbImage& img);

/// Stamps a decimal number with a 3x5 bitmap font scaled by `scale`, top-left at (x, y).
/// A one-pixel dark backing box keeps the digits legible on any background.
void stamp_number(RgbImage& img, int x, int y, int number, Rgb color, int scale = 2);

/// Filled disc outline (ring of given thickness) centred at (cx, cy).
void draw_ring(RgbImage& img, double cx, double cy, double radius, Rgb color, double thickness = 1.5);

/// Stable pseudo-colour for a segment id (0 maps to black).
Rgb segment_color(int id);

}  // namespace navgaze
