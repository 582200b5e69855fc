#include "gad/tensor.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "gad/errors.hpp"

namespace gad {

std::size_t shape_size(const std::vector<std::size_t>& shape) {
  std::size_t n = 1;
  for (std::size_t e : shape) n *= e;
  return shape.empty() ? 0 : n;
}

Tensor::Tensor(std::vector<std::size_t> shape) : shape_(std::move(shape)) {
  for (std::size_t e : shape_) {
    if (e == 0) throw std::invalid_argument("Tensor: extents must be positive");
  }
  data_.assign(shape_size(shape_), 0.0);
}

Tensor::Tensor(std::vector<std::size_t> shape, double fill) : Tensor(std::move(shape)) {
  this->fill(fill);
}

Tensor Tensor::scalar(double v) {
  Tensor t({1, 1});
  t.at(0) = v;
  return t;
}

Tensor Tensor::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw std::invalid_argument("Tensor::from_rows: no rows");
  Tensor t({rows.size(), rows[0].size()});
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != rows[0].size())
      throw std::invalid_argument("Tensor::from_rows: ragged rows");
    for (std::size_t c = 0; c < rows[r].size(); ++c) t.at2(r, c) = rows[r][c];
  }
  return t;
}

Tensor Tensor::row(const std::vector<double>& values) {
  Tensor t({1, values.size()});
  for (std::size_t c = 0; c < values.size(); ++c) t.at(c) = values[c];
  return t;
}

std::size_t Tensor::extent(std::size_t axis) const {
  if (axis >= shape_.size()) throw std::out_of_range("Tensor::extent: axis out of range");
  return shape_[axis];
}

void Tensor::fill(double v) {
  for (double& x : data_) x = v;
}

bool Tensor::all_finite() const {
  for (double x : data_) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

void Tensor::check_finite(const std::string& what) const {
  if (!all_finite()) throw NumericError(what + ": non-finite value in tensor " + shape_str());
}

void Tensor::add_(const Tensor& o) {
  if (!same_shape(o)) {
    throw std::invalid_argument("Tensor::add_: shape mismatch " + shape_str() + " vs " +
                                o.shape_str());
  }
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
}

void Tensor::scale_(double c) {
  for (double& x : data_) x *= c;
}

std::string Tensor::shape_str() const {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < shape_.size(); ++i) {
    if (i) os << ",";
    os << shape_[i];
  }
  os << ")";
  return os.str();
}

Parameter::Parameter(Tensor v, bool trainable_flag)
    : value(std::move(v)), grad(value.shape(), 0.0), trainable(trainable_flag) {}

}  // namespace gad
