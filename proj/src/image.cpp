#include "gad/image.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "gad/errors.hpp"

namespace gad {

bool Box::valid() const {
  return std::isfinite(x0) && std::isfinite(y0) && std::isfinite(x1) && std::isfinite(y1) &&
         x0 >= 0.0 && y0 >= 0.0 && x1 <= 1.0 && y1 <= 1.0 && x0 < x1 && y0 < y1;
}

void write_ppm(const std::string& path, const Image& img) {
  if (img.channels != 3) throw DataError("write_ppm: expects a 3-channel image");
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("write_ppm: cannot open " + path);
  f << "P6\n" << img.width << " " << img.height << "\n255\n";
  f.write(reinterpret_cast<const char*>(img.pixels.data()),
          static_cast<std::streamsize>(img.pixels.size()));
  if (!f) throw DataError("write_ppm: write failed for " + path);
}

Image read_ppm(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("read_ppm: cannot open " + path);
  std::string magic;
  f >> magic;
  if (magic != "P6") throw DataError("read_ppm: " + path + " is not a binary PPM");
  std::size_t w = 0, h = 0, maxval = 0;
  f >> w >> h >> maxval;
  if (!f || w == 0 || h == 0 || maxval != 255)
    throw DataError("read_ppm: malformed header in " + path);
  f.get();  // single whitespace after header
  Image img(w, h, 3);
  f.read(reinterpret_cast<char*>(img.pixels.data()),
         static_cast<std::streamsize>(img.pixels.size()));
  if (!f) throw DataError("read_ppm: truncated pixel data in " + path);
  return img;
}

void write_pgm_ascii(const std::string& path, const std::vector<std::vector<double>>& values) {
  if (values.empty() || values[0].empty()) throw DataError("write_pgm_ascii: empty map");
  const std::size_t h = values.size(), w = values[0].size();
  double mx = 0.0;
  for (const auto& row : values) {
    if (row.size() != w) throw DataError("write_pgm_ascii: ragged rows");
    for (double v : row) mx = std::max(mx, v);
  }
  std::ofstream f(path);
  if (!f) throw DataError("write_pgm_ascii: cannot open " + path);
  f << "P2\n" << w << " " << h << "\n255\n";
  for (const auto& row : values) {
    for (std::size_t x = 0; x < w; ++x) {
      const int g = mx > 0.0 ? static_cast<int>(std::lround(row[x] / mx * 255.0)) : 0;
      f << std::clamp(g, 0, 255) << (x + 1 == w ? "" : " ");
    }
    f << "\n";
  }
  if (!f) throw DataError("write_pgm_ascii: write failed for " + path);
}

}  // namespace gad
