#include "gad/autodiff.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include "gad/errors.hpp"

namespace gad {

namespace kernels {

void matmul_acc(const double* a, const double* b, double* c, std::size_t n, std::size_t k,
                std::size_t m) {
  for (std::size_t i = 0; i < n; ++i) {
    const double* arow = a + i * k;
    double* crow = c + i * m;
    for (std::size_t l = 0; l < k; ++l) {
      const double av = arow[l];
      const double* brow = b + l * m;
      for (std::size_t j = 0; j < m; ++j) crow[j] += av * brow[j];
    }
  }
}

void matmul_nt_acc(const double* a, const double* b, double* c, std::size_t n, std::size_t k,
                   std::size_t m) {
  for (std::size_t i = 0; i < n; ++i) {
    const double* arow = a + i * k;
    double* crow = c + i * m;
    for (std::size_t j = 0; j < m; ++j) {
      const double* brow = b + j * k;
      double acc = 0.0;
      for (std::size_t l = 0; l < k; ++l) acc += arow[l] * brow[l];
      crow[j] += acc;
    }
  }
}

void matmul_tn_acc(const double* a, const double* b, double* c, std::size_t n, std::size_t p,
                   std::size_t q) {
  for (std::size_t i = 0; i < n; ++i) {
    const double* arow = a + i * p;
    const double* brow = b + i * q;
    for (std::size_t l = 0; l < p; ++l) {
      const double av = arow[l];
      double* crow = c + l * q;
      for (std::size_t j = 0; j < q; ++j) crow[j] += av * brow[j];
    }
  }
}

void softmax_inplace(double* v, std::size_t n) {
  double mx = v[0];
  for (std::size_t i = 1; i < n; ++i) mx = std::max(mx, v[i]);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = std::exp(v[i] - mx);
    sum += v[i];
  }
  for (std::size_t i = 0; i < n; ++i) v[i] /= sum;
}

}  // namespace kernels

Tensor& Node::ensure_grad() {
  if (!grad_ready) {
    grad = Tensor(value.shape(), 0.0);
    grad_ready = true;
  }
  return grad;
}

Var Var::leaf(Parameter& p) {
  auto n = std::make_shared<Node>();
  n->value = p.value;
  n->source = &p;
  n->value.check_finite("parameter leaf");
  return Var(n);
}

Var Var::constant(Tensor t) {
  auto n = std::make_shared<Node>();
  t.check_finite("constant");
  n->value = std::move(t);
  return Var(n);
}

namespace {

Var make_node(Tensor value, std::vector<NodePtr> inputs, std::function<void(Node&)> backprop,
              const char* op_name) {
  value.check_finite(op_name);
  auto n = std::make_shared<Node>();
  n->value = std::move(value);
  n->inputs = std::move(inputs);
  n->backprop = std::move(backprop);
  return Var(n);
}

void require_matrix(const Var& v, const char* op) {
  if (!v.defined() || v.value().rank() != 2)
    throw std::invalid_argument(std::string(op) + ": rank-2 tensor required");
}

void require_same_shape(const Var& a, const Var& b, const char* op) {
  if (!a.value().same_shape(b.value()))
    throw std::invalid_argument(std::string(op) + ": shape mismatch " + a.value().shape_str() +
                                " vs " + b.value().shape_str());
}

// Deterministic post-order over the evaluation graph (iterative; graphs can
// be a few thousand nodes deep in composed models).
std::vector<Node*> topo_order(Node* root) {
  std::vector<Node*> order;
  std::unordered_set<Node*> visited;
  std::vector<std::pair<Node*, std::size_t>> stack;
  stack.emplace_back(root, 0);
  visited.insert(root);
  while (!stack.empty()) {
    auto& [node, idx] = stack.back();
    if (idx < node->inputs.size()) {
      Node* child = node->inputs[idx].get();
      ++idx;
      if (visited.insert(child).second) stack.emplace_back(child, 0);
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }
  return order;
}

}  // namespace

void backward(const Var& root, GradMap& grads) {
  if (!root.defined()) throw std::invalid_argument("backward: undefined root");
  if (root.value().size() != 1)
    throw std::invalid_argument("backward: root must be scalar, got " + root.value().shape_str());
  std::vector<Node*> order = topo_order(root.node().get());
  root.node()->ensure_grad().fill(1.0);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* n = *it;
    if (!n->grad_ready) continue;  // no gradient reached this node
    if (n->backprop) n->backprop(*n);
    if (n->source) {
      auto [slot, inserted] = grads.try_emplace(n->source, n->value.shape(), 0.0);
      slot->second.add_(n->grad);
    }
  }
}

void backward(const Var& root) {
  GradMap grads;
  backward(root, grads);
  apply_grad_map(grads);
}

void apply_grad_map(const GradMap& grads, double scale) {
  for (const auto& [param, g] : grads) {
    if (scale == 1.0) {
      param->grad.add_(g);
    } else {
      Tensor scaled = g;
      scaled.scale_(scale);
      param->grad.add_(scaled);
    }
  }
}

Var add(const Var& a, const Var& b) {
  require_same_shape(a, b, "add");
  Tensor out = a.value();
  out.add_(b.value());
  return make_node(std::move(out), {a.node(), b.node()},
                   [](Node& n) {
                     n.inputs[0]->ensure_grad().add_(n.grad);
                     n.inputs[1]->ensure_grad().add_(n.grad);
                   },
                   "add");
}

Var sub(const Var& a, const Var& b) {
  require_same_shape(a, b, "sub");
  Tensor out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out.at(i) -= b.value().at(i);
  return make_node(std::move(out), {a.node(), b.node()},
                   [](Node& n) {
                     n.inputs[0]->ensure_grad().add_(n.grad);
                     Tensor& gb = n.inputs[1]->ensure_grad();
                     for (std::size_t i = 0; i < gb.size(); ++i) gb.at(i) -= n.grad.at(i);
                   },
                   "sub");
}

Var scale(const Var& a, double c) {
  Tensor out = a.value();
  out.scale_(c);
  return make_node(std::move(out), {a.node()},
                   [c](Node& n) {
                     Tensor& ga = n.inputs[0]->ensure_grad();
                     for (std::size_t i = 0; i < ga.size(); ++i) ga.at(i) += c * n.grad.at(i);
                   },
                   "scale");
}

Var mul(const Var& a, const Var& b) {
  require_same_shape(a, b, "mul");
  Tensor out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out.at(i) *= b.value().at(i);
  return make_node(std::move(out), {a.node(), b.node()},
                   [](Node& n) {
                     const Tensor& av = n.inputs[0]->value;
                     const Tensor& bv = n.inputs[1]->value;
                     Tensor& ga = n.inputs[0]->ensure_grad();
                     Tensor& gb = n.inputs[1]->ensure_grad();
                     for (std::size_t i = 0; i < n.grad.size(); ++i) {
                       ga.at(i) += n.grad.at(i) * bv.at(i);
                       gb.at(i) += n.grad.at(i) * av.at(i);
                     }
                   },
                   "mul");
}

Var add_row_broadcast(const Var& x, const Var& row) {
  require_matrix(x, "add_row_broadcast");
  require_matrix(row, "add_row_broadcast");
  if (row.value().rows() != 1 || row.value().cols() != x.value().cols())
    throw std::invalid_argument("add_row_broadcast: row must be 1×cols(x)");
  Tensor out = x.value();
  const std::size_t m = out.rows(), d = out.cols();
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t c = 0; c < d; ++c) out.at2(r, c) += row.value().at(c);
  return make_node(std::move(out), {x.node(), row.node()},
                   [](Node& n) {
                     n.inputs[0]->ensure_grad().add_(n.grad);
                     Tensor& gr = n.inputs[1]->ensure_grad();
                     const std::size_t m = n.grad.rows(), d = n.grad.cols();
                     for (std::size_t r = 0; r < m; ++r)
                       for (std::size_t c = 0; c < d; ++c) gr.at(c) += n.grad.at2(r, c);
                   },
                   "add_row_broadcast");
}

Var matmul(const Var& a, const Var& b) {
  require_matrix(a, "matmul");
  require_matrix(b, "matmul");
  const std::size_t n = a.value().rows(), k = a.value().cols(), m = b.value().cols();
  if (b.value().rows() != k)
    throw std::invalid_argument("matmul: inner dimensions differ, " + a.value().shape_str() +
                                " vs " + b.value().shape_str());
  Tensor out({n, m}, 0.0);
  kernels::matmul_acc(a.value().data(), b.value().data(), out.data(), n, k, m);
  return make_node(std::move(out), {a.node(), b.node()},
                   [n, k, m](Node& node) {
                     const Tensor& av = node.inputs[0]->value;
                     const Tensor& bv = node.inputs[1]->value;
                     // dA += G·Bᵀ ; dB += Aᵀ·G
                     kernels::matmul_nt_acc(node.grad.data(), bv.data(),
                                            node.inputs[0]->ensure_grad().data(), n, m, k);
                     kernels::matmul_tn_acc(av.data(), node.grad.data(),
                                            node.inputs[1]->ensure_grad().data(), n, k, m);
                   },
                   "matmul");
}

Var matmul_nt(const Var& a, const Var& b) {
  require_matrix(a, "matmul_nt");
  require_matrix(b, "matmul_nt");
  const std::size_t n = a.value().rows(), k = a.value().cols(), m = b.value().rows();
  if (b.value().cols() != k)
    throw std::invalid_argument("matmul_nt: inner dimensions differ, " + a.value().shape_str() +
                                " vs " + b.value().shape_str());
  Tensor out({n, m}, 0.0);
  kernels::matmul_nt_acc(a.value().data(), b.value().data(), out.data(), n, k, m);
  return make_node(std::move(out), {a.node(), b.node()},
                   [n, k, m](Node& node) {
                     const Tensor& av = node.inputs[0]->value;
                     const Tensor& bv = node.inputs[1]->value;
                     // dA += G·B ; dB += Gᵀ·A
                     kernels::matmul_acc(node.grad.data(), bv.data(),
                                         node.inputs[0]->ensure_grad().data(), n, m, k);
                     kernels::matmul_tn_acc(node.grad.data(), av.data(),
                                            node.inputs[1]->ensure_grad().data(), n, m, k);
                   },
                   "matmul_nt");
}

Var softmax_rows(const Var& x) {
  require_matrix(x, "softmax_rows");
  Tensor out = x.value();
  const std::size_t m = out.rows(), d = out.cols();
  for (std::size_t r = 0; r < m; ++r) kernels::softmax_inplace(out.data() + r * d, d);
  return make_node(std::move(out), {x.node()},
                   [](Node& n) {
                     const Tensor& y = n.value;
                     Tensor& gx = n.inputs[0]->ensure_grad();
                     const std::size_t m = y.rows(), d = y.cols();
                     for (std::size_t r = 0; r < m; ++r) {
                       double dot = 0.0;
                       for (std::size_t c = 0; c < d; ++c) dot += n.grad.at2(r, c) * y.at2(r, c);
                       for (std::size_t c = 0; c < d; ++c)
                         gx.at2(r, c) += y.at2(r, c) * (n.grad.at2(r, c) - dot);
                     }
                   },
                   "softmax_rows");
}

Var layer_norm_rows(const Var& x, const Var& gamma, const Var& beta, double epsilon) {
  require_matrix(x, "layer_norm_rows");
  const std::size_t m = x.value().rows(), d = x.value().cols();
  if (d == 0) throw std::invalid_argument("layer_norm_rows: zero-length rows");
  if (gamma.value().rows() != 1 || gamma.value().cols() != d || beta.value().rows() != 1 ||
      beta.value().cols() != d)
    throw std::invalid_argument("layer_norm_rows: gamma/beta must be 1×cols(x)");
  Tensor out({m, d});
  Tensor hat({m, d});     // normalized activations, cached for backward
  Tensor inv_std({m, 1});
  for (std::size_t r = 0; r < m; ++r) {
    double mean = 0.0;
    for (std::size_t c = 0; c < d; ++c) mean += x.value().at2(r, c);
    mean /= static_cast<double>(d);
    double var = 0.0;
    for (std::size_t c = 0; c < d; ++c) {
      const double t = x.value().at2(r, c) - mean;
      var += t * t;
    }
    var /= static_cast<double>(d);
    const double r_std = 1.0 / std::sqrt(var + epsilon);
    inv_std.at(r) = r_std;
    for (std::size_t c = 0; c < d; ++c) {
      const double h = (x.value().at2(r, c) - mean) * r_std;
      hat.at2(r, c) = h;
      out.at2(r, c) = h * gamma.value().at(c) + beta.value().at(c);
    }
  }
  return make_node(
      std::move(out), {x.node(), gamma.node(), beta.node()},
      [hat = std::move(hat), inv_std = std::move(inv_std)](Node& n) {
        const Tensor& gv = n.inputs[1]->value;
        Tensor& gx = n.inputs[0]->ensure_grad();
        Tensor& ggamma = n.inputs[1]->ensure_grad();
        Tensor& gbeta = n.inputs[2]->ensure_grad();
        const std::size_t m = n.grad.rows(), d = n.grad.cols();
        const double inv_d = 1.0 / static_cast<double>(d);
        std::vector<double> h(d);
        for (std::size_t r = 0; r < m; ++r) {
          double mean_h = 0.0, mean_hx = 0.0;
          for (std::size_t c = 0; c < d; ++c) {
            const double g = n.grad.at2(r, c);
            ggamma.at(c) += g * hat.at2(r, c);
            gbeta.at(c) += g;
            h[c] = g * gv.at(c);
            mean_h += h[c];
            mean_hx += h[c] * hat.at2(r, c);
          }
          mean_h *= inv_d;
          mean_hx *= inv_d;
          const double r_std = inv_std.at(r);
          for (std::size_t c = 0; c < d; ++c)
            gx.at2(r, c) += r_std * (h[c] - mean_h - hat.at2(r, c) * mean_hx);
        }
      },
      "layer_norm_rows");
}

namespace {
constexpr double kInvSqrt2 = 0.70710678118654752440084436210485;
constexpr double kInvSqrt2Pi = 0.39894228040143267793994605993438;
}  // namespace

Var gelu(const Var& x) {
  Tensor out = x.value();
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double v = out.at(i);
    out.at(i) = 0.5 * v * (1.0 + std::erf(v * kInvSqrt2));
  }
  return make_node(std::move(out), {x.node()},
                   [](Node& n) {
                     const Tensor& xv = n.inputs[0]->value;
                     Tensor& gx = n.inputs[0]->ensure_grad();
                     for (std::size_t i = 0; i < n.grad.size(); ++i) {
                       const double v = xv.at(i);
                       const double cdf = 0.5 * (1.0 + std::erf(v * kInvSqrt2));
                       const double pdf = kInvSqrt2Pi * std::exp(-0.5 * v * v);
                       gx.at(i) += n.grad.at(i) * (cdf + v * pdf);
                     }
                   },
                   "gelu");
}

Var slice_rows(const Var& x, std::size_t r0, std::size_t r1) {
  require_matrix(x, "slice_rows");
  const std::size_t m = x.value().rows(), d = x.value().cols();
  if (r0 >= r1 || r1 > m) throw std::invalid_argument("slice_rows: invalid range");
  Tensor out({r1 - r0, d});
  for (std::size_t r = r0; r < r1; ++r)
    for (std::size_t c = 0; c < d; ++c) out.at2(r - r0, c) = x.value().at2(r, c);
  return make_node(std::move(out), {x.node()},
                   [r0](Node& n) {
                     Tensor& gx = n.inputs[0]->ensure_grad();
                     const std::size_t rows = n.grad.rows(), d = n.grad.cols();
                     for (std::size_t r = 0; r < rows; ++r)
                       for (std::size_t c = 0; c < d; ++c)
                         gx.at2(r0 + r, c) += n.grad.at2(r, c);
                   },
                   "slice_rows");
}

Var concat_rows(const std::vector<Var>& parts) {
  if (parts.empty()) throw std::invalid_argument("concat_rows: no parts");
  std::size_t total = 0;
  const std::size_t d = parts[0].value().cols();
  std::vector<NodePtr> inputs;
  for (const Var& p : parts) {
    require_matrix(p, "concat_rows");
    if (p.value().cols() != d) throw std::invalid_argument("concat_rows: column mismatch");
    total += p.value().rows();
    inputs.push_back(p.node());
  }
  Tensor out({total, d});
  std::size_t r = 0;
  for (const Var& p : parts) {
    for (std::size_t pr = 0; pr < p.value().rows(); ++pr, ++r)
      for (std::size_t c = 0; c < d; ++c) out.at2(r, c) = p.value().at2(pr, c);
  }
  return make_node(std::move(out), std::move(inputs),
                   [](Node& n) {
                     const std::size_t d = n.grad.cols();
                     std::size_t r = 0;
                     for (auto& in : n.inputs) {
                       Tensor& g = in->ensure_grad();
                       for (std::size_t pr = 0; pr < in->value.rows(); ++pr, ++r)
                         for (std::size_t c = 0; c < d; ++c) g.at2(pr, c) += n.grad.at2(r, c);
                     }
                   },
                   "concat_rows");
}

Var slice_cols(const Var& x, std::size_t c0, std::size_t c1) {
  require_matrix(x, "slice_cols");
  const std::size_t m = x.value().rows(), d = x.value().cols();
  if (c0 >= c1 || c1 > d) throw std::invalid_argument("slice_cols: invalid range");
  Tensor out({m, c1 - c0});
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t c = c0; c < c1; ++c) out.at2(r, c - c0) = x.value().at2(r, c);
  return make_node(std::move(out), {x.node()},
                   [c0](Node& n) {
                     Tensor& gx = n.inputs[0]->ensure_grad();
                     const std::size_t m = n.grad.rows(), w = n.grad.cols();
                     for (std::size_t r = 0; r < m; ++r)
                       for (std::size_t c = 0; c < w; ++c) gx.at2(r, c0 + c) += n.grad.at2(r, c);
                   },
                   "slice_cols");
}

Var concat_cols(const std::vector<Var>& parts) {
  if (parts.empty()) throw std::invalid_argument("concat_cols: no parts");
  const std::size_t m = parts[0].value().rows();
  std::size_t total = 0;
  std::vector<NodePtr> inputs;
  for (const Var& p : parts) {
    require_matrix(p, "concat_cols");
    if (p.value().rows() != m) throw std::invalid_argument("concat_cols: row mismatch");
    total += p.value().cols();
    inputs.push_back(p.node());
  }
  Tensor out({m, total});
  std::size_t base = 0;
  for (const Var& p : parts) {
    for (std::size_t r = 0; r < m; ++r)
      for (std::size_t c = 0; c < p.value().cols(); ++c)
        out.at2(r, base + c) = p.value().at2(r, c);
    base += p.value().cols();
  }
  return make_node(std::move(out), std::move(inputs),
                   [](Node& n) {
                     const std::size_t m = n.grad.rows();
                     std::size_t base = 0;
                     for (auto& in : n.inputs) {
                       Tensor& g = in->ensure_grad();
                       const std::size_t w = in->value.cols();
                       for (std::size_t r = 0; r < m; ++r)
                         for (std::size_t c = 0; c < w; ++c) g.at2(r, c) += n.grad.at2(r, base + c);
                       base += w;
                     }
                   },
                   "concat_cols");
}

Var mean_of(const std::vector<Var>& parts) {
  if (parts.empty()) throw std::invalid_argument("mean_of: no parts");
  Tensor out = parts[0].value();
  std::vector<NodePtr> inputs{parts[0].node()};
  for (std::size_t i = 1; i < parts.size(); ++i) {
    require_same_shape(parts[0], parts[i], "mean_of");
    out.add_(parts[i].value());
    inputs.push_back(parts[i].node());
  }
  const double inv = 1.0 / static_cast<double>(parts.size());
  out.scale_(inv);
  return make_node(std::move(out), std::move(inputs),
                   [inv](Node& n) {
                     for (auto& in : n.inputs) {
                       Tensor& g = in->ensure_grad();
                       for (std::size_t i = 0; i < g.size(); ++i) g.at(i) += inv * n.grad.at(i);
                     }
                   },
                   "mean_of");
}

Var sum_all(const Var& x) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.value().size(); ++i) s += x.value().at(i);
  return make_node(Tensor::scalar(s), {x.node()},
                   [](Node& n) {
                     Tensor& g = n.inputs[0]->ensure_grad();
                     const double gv = n.grad.at(0);
                     for (std::size_t i = 0; i < g.size(); ++i) g.at(i) += gv;
                   },
                   "sum_all");
}

Var mean_all(const Var& x) {
  return scale(sum_all(x), 1.0 / static_cast<double>(x.value().size()));
}

Var logsumexp_row(const Var& x) {
  require_matrix(x, "logsumexp_row");
  if (x.value().rows() != 1) throw std::invalid_argument("logsumexp_row: expects a 1×n row");
  const std::size_t d = x.value().cols();
  double mx = x.value().at(0);
  for (std::size_t i = 1; i < d; ++i) mx = std::max(mx, x.value().at(i));
  double sum = 0.0;
  for (std::size_t i = 0; i < d; ++i) sum += std::exp(x.value().at(i) - mx);
  return make_node(Tensor::scalar(mx + std::log(sum)), {x.node()},
                   [](Node& n) {
                     const Tensor& xv = n.inputs[0]->value;
                     Tensor& gx = n.inputs[0]->ensure_grad();
                     std::vector<double> p(xv.size());
                     for (std::size_t i = 0; i < xv.size(); ++i) p[i] = xv.at(i);
                     kernels::softmax_inplace(p.data(), p.size());
                     const double gv = n.grad.at(0);
                     for (std::size_t i = 0; i < p.size(); ++i) gx.at(i) += gv * p[i];
                   },
                   "logsumexp_row");
}

Var l2_normalize_rows(const Var& x) {
  require_matrix(x, "l2_normalize_rows");
  const std::size_t m = x.value().rows(), d = x.value().cols();
  Tensor out({m, d});
  Tensor inv_norm({m, 1});
  for (std::size_t r = 0; r < m; ++r) {
    double sq = 0.0;
    for (std::size_t c = 0; c < d; ++c) sq += x.value().at2(r, c) * x.value().at2(r, c);
    const double inv = 1.0 / std::sqrt(sq);
    inv_norm.at(r) = inv;
    for (std::size_t c = 0; c < d; ++c) out.at2(r, c) = x.value().at2(r, c) * inv;
  }
  return make_node(std::move(out), {x.node()},
                   [inv_norm = std::move(inv_norm)](Node& n) {
                     const Tensor& y = n.value;
                     Tensor& gx = n.inputs[0]->ensure_grad();
                     const std::size_t m = y.rows(), d = y.cols();
                     for (std::size_t r = 0; r < m; ++r) {
                       double dot = 0.0;
                       for (std::size_t c = 0; c < d; ++c) dot += n.grad.at2(r, c) * y.at2(r, c);
                       const double inv = inv_norm.at(r);
                       for (std::size_t c = 0; c < d; ++c)
                         gx.at2(r, c) += inv * (n.grad.at2(r, c) - y.at2(r, c) * dot);
                     }
                   },
                   "l2_normalize_rows");
}

Var cross_entropy_mean(const Var& logits, const std::vector<int>& targets) {
  require_matrix(logits, "cross_entropy_mean");
  const std::size_t m = logits.value().rows(), d = logits.value().cols();
  if (targets.size() != m)
    throw std::invalid_argument("cross_entropy_mean: one target per row required");
  std::size_t active = 0;
  for (int t : targets) {
    if (t >= 0) {
      if (static_cast<std::size_t>(t) >= d)
        throw std::invalid_argument("cross_entropy_mean: target index out of range");
      ++active;
    }
  }
  if (active == 0) return Var::scalar(0.0);
  // probabilities cached for backward
  Tensor probs = logits.value();
  double total = 0.0;
  for (std::size_t r = 0; r < m; ++r) {
    kernels::softmax_inplace(probs.data() + r * d, d);
    if (targets[r] >= 0)
      total -= std::log(probs.at2(r, static_cast<std::size_t>(targets[r])));
  }
  total /= static_cast<double>(active);
  return make_node(Tensor::scalar(total), {logits.node()},
                   [targets, probs = std::move(probs), active](Node& n) {
                     Tensor& gx = n.inputs[0]->ensure_grad();
                     const std::size_t m = probs.rows(), d = probs.cols();
                     const double gv = n.grad.at(0) / static_cast<double>(active);
                     for (std::size_t r = 0; r < m; ++r) {
                       if (targets[r] < 0) continue;
                       for (std::size_t c = 0; c < d; ++c) {
                         const double onehot =
                             (c == static_cast<std::size_t>(targets[r])) ? 1.0 : 0.0;
                         gx.at2(r, c) += gv * (probs.at2(r, c) - onehot);
                       }
                     }
                   },
                   "cross_entropy_mean");
}

Var gather_weighted_rows(const Var& x, const std::vector<WeightedRow>& entries) {
  require_matrix(x, "gather_weighted_rows");
  if (entries.empty()) throw std::invalid_argument("gather_weighted_rows: no entries");
  const std::size_t m = x.value().rows(), d = x.value().cols();
  Tensor out({1, d}, 0.0);
  for (const auto& e : entries) {
    if (e.row >= m) throw std::invalid_argument("gather_weighted_rows: row out of range");
    for (std::size_t c = 0; c < d; ++c) out.at(c) += e.weight * x.value().at2(e.row, c);
  }
  return make_node(std::move(out), {x.node()},
                   [entries](Node& n) {
                     Tensor& gx = n.inputs[0]->ensure_grad();
                     const std::size_t d = n.grad.cols();
                     for (const auto& e : entries)
                       for (std::size_t c = 0; c < d; ++c)
                         gx.at2(e.row, c) += e.weight * n.grad.at(c);
                   },
                   "gather_weighted_rows");
}

}  // namespace gad
