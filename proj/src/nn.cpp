#include "gad/nn.hpp"

#include <cmath>
#include <stdexcept>

#include "gad/errors.hpp"

namespace gad {

void AttentionConfig::validate() const {
  if (model_dim == 0 || heads == 0 || ffn_hidden == 0)
    throw ConfigError("AttentionConfig: dimensions must be positive");
  if (model_dim % heads != 0)
    throw ConfigError("AttentionConfig: model_dim must be divisible by heads");
}

Linear::Linear(std::size_t in_dim, std::size_t out_dim, Rng& rng, double init_std) {
  Tensor w({in_dim, out_dim});
  for (std::size_t i = 0; i < w.size(); ++i) w.at(i) = rng.normal(0.0, init_std);
  weight = Parameter(std::move(w));
  bias = Parameter(Tensor({1, out_dim}, 0.0));
}

Var Linear::forward(const Var& x) const {
  return add_row_broadcast(matmul(x, Var::leaf(const_cast<Parameter&>(weight))),
                           Var::leaf(const_cast<Parameter&>(bias)));
}

void Linear::params(ParamList& out, const std::string& prefix) {
  out.emplace_back(prefix + ".weight", &weight);
  out.emplace_back(prefix + ".bias", &bias);
}

LayerNorm::LayerNorm(std::size_t dim, double eps) : epsilon(eps) {
  gamma = Parameter(Tensor({1, dim}, 1.0));
  beta = Parameter(Tensor({1, dim}, 0.0));
}

Var LayerNorm::forward(const Var& x) const {
  return layer_norm_rows(x, Var::leaf(const_cast<Parameter&>(gamma)),
                         Var::leaf(const_cast<Parameter&>(beta)), epsilon);
}

void LayerNorm::params(ParamList& out, const std::string& prefix) {
  out.emplace_back(prefix + ".gamma", &gamma);
  out.emplace_back(prefix + ".beta", &beta);
}

MultiHeadAttention::MultiHeadAttention(const AttentionConfig& cfg, Rng& rng) : heads(cfg.heads) {
  cfg.validate();
  query = Linear(cfg.model_dim, cfg.model_dim, rng);
  key = Linear(cfg.model_dim, cfg.model_dim, rng);
  value = Linear(cfg.model_dim, cfg.model_dim, rng);
  output = Linear(cfg.model_dim, cfg.model_dim, rng);
}

Var MultiHeadAttention::forward(const Var& queries, const Var& keys, const Var& values,
                                AttentionWeights* record) const {
  if (keys.value().rows() == 0 || values.value().rows() == 0)
    throw std::invalid_argument("attention: at least one key/value row required");
  if (keys.value().rows() != values.value().rows())
    throw std::invalid_argument("attention: key/value row counts differ");
  const Var q = query.forward(queries);
  const Var k = key.forward(keys);
  const Var v = value.forward(values);
  const std::size_t dim = q.value().cols();
  const std::size_t head_dim = dim / heads;
  const double inv_scale = 1.0 / std::sqrt(static_cast<double>(head_dim));
  std::vector<Var> attended;
  attended.reserve(heads);
  for (std::size_t h = 0; h < heads; ++h) {
    const std::size_t c0 = h * head_dim, c1 = c0 + head_dim;
    const Var qh = slice_cols(q, c0, c1);
    const Var kh = slice_cols(k, c0, c1);
    const Var vh = slice_cols(v, c0, c1);
    const Var weights = softmax_rows(scale(matmul_nt(qh, kh), inv_scale));
    if (record) record->per_head.push_back(weights.value());
    attended.push_back(matmul(weights, vh));
  }
  return output.forward(heads == 1 ? attended[0] : concat_cols(attended));
}

void MultiHeadAttention::params(ParamList& out, const std::string& prefix) {
  query.params(out, prefix + ".query");
  key.params(out, prefix + ".key");
  value.params(out, prefix + ".value");
  output.params(out, prefix + ".output");
}

FeedForward::FeedForward(std::size_t dim, std::size_t hidden, Rng& rng) {
  fc1 = Linear(dim, hidden, rng);
  fc2 = Linear(hidden, dim, rng);
}

void FeedForward::params(ParamList& out, const std::string& prefix) {
  fc1.params(out, prefix + ".fc1");
  fc2.params(out, prefix + ".fc2");
}

}  // namespace gad
