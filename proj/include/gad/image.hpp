#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace gad {

// Normalized box, origin top-left, 0 ≤ x0 < x1 ≤ 1 and likewise for y.
struct Box {
  double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;
  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  bool valid() const;
};

// 8-bit interleaved image, row-major.
struct Image {
  std::size_t width = 0, height = 0, channels = 0;
  std::vector<std::uint8_t> pixels;

  Image() = default;
  Image(std::size_t w, std::size_t h, std::size_t c)
      : width(w), height(h), channels(c), pixels(w * h * c, 0) {}

  std::uint8_t& at(std::size_t x, std::size_t y, std::size_t c) {
    return pixels[(y * width + x) * channels + c];
  }
  std::uint8_t at(std::size_t x, std::size_t y, std::size_t c) const {
    return pixels[(y * width + x) * channels + c];
  }
};

// Binary PPM (P6) for RGB frames, ASCII PGM (P2) for heat maps.
void write_ppm(const std::string& path, const Image& img);
Image read_ppm(const std::string& path);
void write_pgm_ascii(const std::string& path, const std::vector<std::vector<double>>& values);

}  // namespace gad
