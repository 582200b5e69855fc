#pragma once

#include <string>

#include "gad/tensor.hpp"

namespace gad {

// Tensor file format: rank, then one extent per axis, all as 64-bit
// little-endian unsigned integers, followed by the row-major values as
// 64-bit little-endian IEEE-754 reals.
void write_tensor(const std::string& path, const Tensor& t);
Tensor read_tensor(const std::string& path);

}  // namespace gad
