#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace gad {

// Dense row-major tensor of 64-bit reals. Desk scale: everything is double,
// shapes are small, correctness and checkability beat speed.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> shape);
  Tensor(std::vector<std::size_t> shape, double fill);

  static Tensor matrix(std::size_t rows, std::size_t cols) { return Tensor({rows, cols}); }
  static Tensor scalar(double v);
  static Tensor from_rows(const std::vector<std::vector<double>>& rows);
  static Tensor row(const std::vector<double>& values);

  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t size() const { return data_.size(); }
  std::size_t extent(std::size_t axis) const;
  std::size_t rows() const { return extent(0); }
  std::size_t cols() const { return extent(1); }
  bool empty() const { return data_.empty(); }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  double& at(std::size_t i) { return data_[i]; }
  double at(std::size_t i) const { return data_[i]; }
  double& at2(std::size_t r, std::size_t c) { return data_[r * cols() + c]; }
  double at2(std::size_t r, std::size_t c) const { return data_[r * cols() + c]; }

  void fill(double v);
  bool same_shape(const Tensor& o) const { return shape_ == o.shape_; }
  bool all_finite() const;
  void check_finite(const std::string& what) const;

  void add_(const Tensor& o);   // elementwise +=
  void scale_(double c);

  std::string shape_str() const;

 private:
  std::vector<std::size_t> shape_;
  std::vector<double> data_;
};

std::size_t shape_size(const std::vector<std::size_t>& shape);

// Model parameter: value plus a gradient accumulator of identical shape.
// The optimizer never touches parameters with trainable == false.
struct Parameter {
  Tensor value;
  Tensor grad;
  bool trainable = true;

  Parameter() = default;
  explicit Parameter(Tensor v, bool trainable_flag = true);

  void zero_grad() { grad.fill(0.0); }
  std::size_t size() const { return value.size(); }
};

// Ordered (name, parameter) registry used by the optimizer, checkpoints and
// the gradient checker. Order is the deterministic construction order.
using ParamList = std::vector<std::pair<std::string, Parameter*>>;

}  // namespace gad
