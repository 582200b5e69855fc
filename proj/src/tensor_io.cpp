#include "gad/tensor_io.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "gad/errors.hpp"

namespace gad {

namespace {

void put_u64_le(std::ostream& os, std::uint64_t v) {
  unsigned char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  os.write(reinterpret_cast<const char*>(buf), 8);
}

std::uint64_t get_u64_le(std::istream& is) {
  unsigned char buf[8];
  is.read(reinterpret_cast<char*>(buf), 8);
  if (!is) throw DataError("tensor file: truncated header");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return v;
}

}  // namespace

void write_tensor(const std::string& path, const Tensor& t) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("write_tensor: cannot open " + path);
  put_u64_le(f, t.rank());
  for (std::size_t e : t.shape()) put_u64_le(f, e);
  for (std::size_t i = 0; i < t.size(); ++i) {
    std::uint64_t bits = 0;
    static_assert(sizeof(double) == sizeof(std::uint64_t));
    const double v = t.at(i);
    std::memcpy(&bits, &v, 8);
    put_u64_le(f, bits);
  }
  if (!f) throw DataError("write_tensor: write failed for " + path);
}

Tensor read_tensor(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("read_tensor: cannot open " + path);
  const std::uint64_t rank = get_u64_le(f);
  if (rank == 0 || rank > 8) throw DataError("read_tensor: implausible rank in " + path);
  std::vector<std::size_t> shape(rank);
  for (auto& e : shape) {
    e = static_cast<std::size_t>(get_u64_le(f));
    if (e == 0) throw DataError("read_tensor: zero extent in " + path);
  }
  Tensor t(shape);
  for (std::size_t i = 0; i < t.size(); ++i) {
    const std::uint64_t bits = get_u64_le(f);
    double v = 0.0;
    std::memcpy(&v, &bits, 8);
    t.at(i) = v;
  }
  return t;
}

}  // namespace gad
