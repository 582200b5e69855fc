#pragma once

#include <functional>
#include <map>
#include <memory>
#include <vector>

#include "gad/tensor.hpp"

namespace gad {

// One recorded operation result. `backprop` reads this node's gradient and
// accumulates into the inputs' gradients; composing these transforms in
// reverse evaluation order realizes the chain rule.
struct Node {
  Tensor value;
  Tensor grad;
  bool grad_ready = false;
  std::vector<std::shared_ptr<Node>> inputs;
  std::function<void(Node&)> backprop;
  Parameter* source = nullptr;  // set on parameter leaves

  Tensor& ensure_grad();
};

using NodePtr = std::shared_ptr<Node>;

// Handle to a node in the recorded evaluation graph.
class Var {
 public:
  Var() = default;
  explicit Var(NodePtr n) : node_(std::move(n)) {}

  // Leaf bound to a parameter; gradients reaching it flow to the parameter.
  static Var leaf(Parameter& p);
  // Leaf with no gradient destination.
  static Var constant(Tensor t);
  static Var scalar(double v) { return constant(Tensor::scalar(v)); }

  bool defined() const { return static_cast<bool>(node_); }
  const Tensor& value() const { return node_->value; }
  double scalar_value() const { return node_->value.at(0); }
  const NodePtr& node() const { return node_; }

 private:
  NodePtr node_;
};

// Per-pass gradient accumulator keyed by parameter. Lets concurrent passes
// over independent graphs collect gradients without touching shared state;
// the caller reduces maps in a fixed order.
using GradMap = std::map<Parameter*, Tensor>;

// Reverse-mode sweep from a scalar root. Leaf gradients are summed into
// `grads` (allocated on first touch).
void backward(const Var& root, GradMap& grads);
// Convenience for single-threaded use: accumulate into Parameter::grad.
void backward(const Var& root);
void apply_grad_map(const GradMap& grads, double scale = 1.0);

// ---- differentiable operations (matrices are rank-2, row-major) ----

Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var scale(const Var& a, double c);
Var mul(const Var& a, const Var& b);                     // elementwise
Var add_row_broadcast(const Var& x, const Var& row);     // x: M×D, row: 1×D
Var matmul(const Var& a, const Var& b);                  // (n×k)·(k×m)
Var matmul_nt(const Var& a, const Var& b);               // (n×k)·(m×k)ᵀ → n×m
Var softmax_rows(const Var& x);
Var layer_norm_rows(const Var& x, const Var& gamma, const Var& beta, double epsilon);
Var gelu(const Var& x);
Var slice_rows(const Var& x, std::size_t r0, std::size_t r1);
Var concat_rows(const std::vector<Var>& parts);
Var slice_cols(const Var& x, std::size_t c0, std::size_t c1);
Var concat_cols(const std::vector<Var>& parts);
Var mean_of(const std::vector<Var>& parts);              // elementwise mean
Var sum_all(const Var& x);                               // → 1×1
Var mean_all(const Var& x);                              // → 1×1
Var logsumexp_row(const Var& x);                         // 1×n → 1×1
Var l2_normalize_rows(const Var& x);
// Mean cross-entropy of row-wise logits against integer targets; a target of
// -1 excludes that row from the mean.
Var cross_entropy_mean(const Var& logits, const std::vector<int>& targets);

struct WeightedRow {
  std::size_t row;
  double weight;
};
// 1×D weighted combination of selected rows (linear map; used by RoI pooling).
Var gather_weighted_rows(const Var& x, const std::vector<WeightedRow>& entries);

// ---- raw kernels shared with plain (non-recorded) numeric code ----
namespace kernels {
// c += a·b, a: n×k, b: k×m
void matmul_acc(const double* a, const double* b, double* c, std::size_t n, std::size_t k,
                std::size_t m);
// c += a·bᵀ, a: n×k, b: m×k
void matmul_nt_acc(const double* a, const double* b, double* c, std::size_t n, std::size_t k,
                   std::size_t m);
// c += aᵀ·b, a: n×p, b: n×q → c: p×q
void matmul_tn_acc(const double* a, const double* b, double* c, std::size_t n, std::size_t p,
                   std::size_t q);
void softmax_inplace(double* v, std::size_t n);
}  // namespace kernels

}  // namespace gad
