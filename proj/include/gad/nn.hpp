#pragma once

#include <string>
#include <vector>

#include "gad/autodiff.hpp"
#include "gad/rng.hpp"
#include "gad/tensor.hpp"

namespace gad {

struct AttentionConfig {
  std::size_t model_dim = 32;
  std::size_t heads = 4;
  std::size_t ffn_hidden = 128;

  void validate() const;
  std::size_t head_dim() const { return model_dim / heads; }
};

class Linear {
 public:
  Linear() = default;
  Linear(std::size_t in_dim, std::size_t out_dim, Rng& rng, double init_std = 0.02);

  Var forward(const Var& x) const;  // x: M×in → M×out
  void params(ParamList& out, const std::string& prefix);
  std::size_t in_dim() const { return weight.value.rows(); }
  std::size_t out_dim() const { return weight.value.cols(); }

  Parameter weight;  // in×out
  Parameter bias;    // 1×out
};

class LayerNorm {
 public:
  LayerNorm() = default;
  explicit LayerNorm(std::size_t dim, double epsilon = 1e-5);

  Var forward(const Var& x) const;
  void params(ParamList& out, const std::string& prefix);

  Parameter gamma;  // 1×dim
  Parameter beta;   // 1×dim
  double epsilon = 1e-5;
};

// Per-head attention weights captured during a forward pass.
struct AttentionWeights {
  std::vector<Tensor> per_head;  // each n_q×n_k, rows sum to 1
};

// Standard projected multi-head cross-attention.
class MultiHeadAttention {
 public:
  MultiHeadAttention() = default;
  MultiHeadAttention(const AttentionConfig& cfg, Rng& rng);

  Var forward(const Var& queries, const Var& keys, const Var& values,
              AttentionWeights* record = nullptr) const;
  void params(ParamList& out, const std::string& prefix);

  Linear query, key, value, output;
  std::size_t heads = 1;
};

class FeedForward {
 public:
  FeedForward() = default;
  FeedForward(std::size_t dim, std::size_t hidden, Rng& rng);

  Var forward(const Var& x) const { return fc2.forward(gelu(fc1.forward(x))); }
  void params(ParamList& out, const std::string& prefix);

  Linear fc1, fc2;
};

}  // namespace gad
