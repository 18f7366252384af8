#include "navgaze/image_io.hpp"

#include <cmath>
#include <ostream>
#include <sstream>
#include <string>

namespace navgaze {

RgbImage::RgbImage(int w, int h, Rgb fill) : width(w), height(h) {
  data.resize(static_cast<std::size_t>(w) * h * 3);
  for (std::size_t i = 0; i < data.size(); i += 3) {
    data[i] = fill[0];
    data[i + 1] = fill[1];
    data[i + 2] = fill[2];
  }
}

void RgbImage::set(int x, int y, Rgb c) {
  if (x < 0 || y < 0 || x >= width || y >= height) return;
  const std::size_t i = (static_cast<std::size_t>(y) * width + x) * 3;
  data[i] = c[0];
  data[i + 1] = c[1];
  data[i + 2] = c[2];
}

Rgb RgbImage::get(int x, int y) const {
  const std::size_t i = (static_cast<std::size_t>(y) * width + x) * 3;
  return {data[i], data[i + 1], data[i + 2]};
}

void write_pgm(std::ostream& out, const GrayImage& img) {
  out << "P5\n" << img.width << ' ' << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.data.data()),
            static_cast<std::streamsize>(img.data.size()));
}

void write_ppm(std::ostream& out, const RgbImage& img) {
  out << "P6\n" << img.width << ' ' << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.data.data()),
            static_cast<std::streamsize>(img.data.size()));
}

std::string encode_ppm(const RgbImage& img) {
  std::ostringstream ss;
  write_ppm(ss, img);
  return ss.str();
}

namespace {

// 3x5 glyphs, one row per entry, bit 2 = leftmost column.
constexpr std::uint8_t kDigits[10][5] = {
    {7, 5, 5, 5, 7}, {2, 6, 2, 2, 7}, {7, 1, 7, 4, 7}, {7, 1, 7, 1, 7}, {5, 5, 7, 1, 1},
    {7, 4, 7, 1, 7}, {7, 4, 7, 5, 7}, {7, 1, 1, 1, 1}, {7, 5, 7, 5, 7}, {7, 5, 7, 1, 7},
};

}  // namespace

void stamp_number(RgbImage& img, int x, int y, int number, Rgb color, int scale) {
  const std::string text = std::to_string(number);
  const int glyph_w = 4 * scale;
  const int total_w = static_cast<int>(text.size()) * glyph_w + scale;
  for (int yy = y - scale; yy < y + 6 * scale; ++yy) {
    for (int xx = x - scale; xx < x + total_w; ++xx) img.set(xx, yy, {0, 0, 0});
  }
  int cursor = x;
  for (char ch : text) {
    if (ch < '0' || ch > '9') {
      cursor += glyph_w;
      continue;
    }
    const auto& glyph = kDigits[ch - '0'];
    for (int row = 0; row < 5; ++row) {
      for (int col = 0; col < 3; ++col) {
        if (!(glyph[row] & (4 >> col))) continue;
        for (int sy = 0; sy < scale; ++sy) {
          for (int sx = 0; sx < scale; ++sx) img.set(cursor + col * scale + sx, y + row * scale + sy, color);
        }
      }
    }
    cursor += glyph_w;
  }
}

void draw_ring(RgbImage& img, double cx, double cy, double radius, Rgb color, double thickness) {
  const int x0 = static_cast<int>(std::floor(cx - radius - thickness));
  const int x1 = static_cast<int>(std::ceil(cx + radius + thickness));
  const int y0 = static_cast<int>(std::floor(cy - radius - thickness));
  const int y1 = static_cast<int>(std::ceil(cy + radius + thickness));
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      const double d = std::hypot(x - cx, y - cy);
      if (std::abs(d - radius) <= thickness * 0.5) img.set(x, y, color);
    }
  }
}

Rgb segment_color(int id) {
  if (id == 0) return {0, 0, 0};
  std::uint32_t h = static_cast<std::uint32_t>(id) * 2654435761u;
  h ^= h >> 15;
  return {static_cast<std::uint8_t>(64 + (h & 0x7f)), static_cast<std::uint8_t>(64 + ((h >> 8) & 0x7f)),
          static_cast<std::uint8_t>(64 + ((h >> 16) & 0x7f))};
}

}  // namespace navgaze
