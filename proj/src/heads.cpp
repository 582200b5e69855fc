#include "gad/heads.hpp"

#include <cmath>

#include "gad/errors.hpp"

namespace gad {

OutlierMode parse_outlier_mode(const std::string& s) {
  if (s == "token") return OutlierMode::token;
  if (s == "background") return OutlierMode::background;
  throw ConfigError("unknown outlier mode '" + s + "' (expected token|background)");
}

std::string to_string(OutlierMode m) {
  return m == OutlierMode::token ? "token" : "background";
}

void HeadConfig::validate() const {
  if (model_dim == 0 || embed_dim == 0 || activities == 0 || actions == 0 || group_tokens == 0)
    throw ConfigError("HeadConfig: dimensions and class counts must be positive");
}

PredictionHeads::PredictionHeads(const HeadConfig& cfg, Rng& rng) : cfg_(cfg) {
  cfg_.validate();
  group_activity_ = Linear(cfg_.model_dim, cfg_.activities + 1, rng);
  actor_action_ = Linear(cfg_.model_dim, cfg_.actions, rng);
  actor_proj_ = Linear(cfg_.model_dim, cfg_.embed_dim, rng);
  group_proj_ = Linear(cfg_.model_dim, cfg_.embed_dim, rng);
  Tensor tok({1, cfg_.model_dim});
  for (std::size_t i = 0; i < tok.size(); ++i) tok.at(i) = rng.normal(0.0, 0.02);
  outlier_token_ = Parameter(std::move(tok));
}

Var PredictionHeads::group_logits(const Var& groups) const {
  return group_activity_.forward(groups);
}

Var PredictionHeads::action_logits(const Var& actors) const {
  return actor_action_.forward(actors);
}

Var PredictionHeads::actor_embeddings(const Var& actors) const {
  return actor_proj_.forward(actors);
}

Var PredictionHeads::group_embeddings(const Var& groups) const {
  Var input = groups;
  if (cfg_.outlier_mode == OutlierMode::token)
    input = concat_rows({groups, Var::leaf(const_cast<Parameter&>(outlier_token_))});
  return group_proj_.forward(input);
}

Var PredictionHeads::membership_affinity(const Var& actors, const Var& groups) const {
  const double inv_scale = 1.0 / std::sqrt(static_cast<double>(cfg_.embed_dim));
  return scale(matmul_nt(actor_embeddings(actors), group_embeddings(groups)), inv_scale);
}

void PredictionHeads::params(ParamList& out, const std::string& prefix) {
  group_activity_.params(out, prefix + ".group_activity");
  actor_action_.params(out, prefix + ".actor_action");
  actor_proj_.params(out, prefix + ".actor_proj");
  group_proj_.params(out, prefix + ".group_proj");
  out.emplace_back(prefix + ".outlier_token", &outlier_token_);
}

Var temporal_pool(const std::vector<Var>& per_frame) {
  if (per_frame.empty()) throw std::invalid_argument("temporal_pool: no frames");
  return per_frame.size() == 1 ? per_frame[0] : mean_of(per_frame);
}

namespace {

std::size_t argmax_row(const Tensor& t, std::size_t row) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < t.cols(); ++c) {
    if (t.at2(row, c) > t.at2(row, best)) best = c;
  }
  return best;
}

}  // namespace

Tensor softmax_rows_tensor(const Tensor& logits) {
  Tensor probs = logits;
  for (std::size_t r = 0; r < probs.rows(); ++r)
    kernels::softmax_inplace(probs.data() + r * probs.cols(), probs.cols());
  return probs;
}

std::vector<int> assign_actors(const Tensor& affinity, const Tensor& group_probs,
                               const HeadConfig& cfg) {
  if (affinity.cols() != cfg.affinity_cols())
    throw std::invalid_argument("assign_actors: affinity has wrong column count");
  const std::size_t k = cfg.group_tokens;
  std::vector<bool> background(k);
  for (std::size_t g = 0; g < k; ++g)
    background[g] = argmax_row(group_probs, g) == cfg.background_class();
  std::vector<int> out(affinity.rows(), kOutlier);
  for (std::size_t i = 0; i < affinity.rows(); ++i) {
    const std::size_t best = argmax_row(affinity, i);
    if (best >= k) continue;             // outlier column
    if (background[best]) continue;      // background token ⇒ outlier
    out[i] = static_cast<int>(best);
  }
  return out;
}

std::vector<GroupPrediction> build_group_predictions(const std::vector<int>& assignment,
                                                     const Tensor& group_probs,
                                                     const HeadConfig& cfg) {
  std::vector<GroupPrediction> preds;
  for (std::size_t g = 0; g < cfg.group_tokens; ++g) {
    GroupPrediction p;
    for (std::size_t i = 0; i < assignment.size(); ++i)
      if (assignment[i] == static_cast<int>(g)) p.members.push_back(static_cast<int>(i));
    if (p.members.empty()) continue;
    std::size_t best_cls = 0;
    for (std::size_t c = 1; c < cfg.activities; ++c)
      if (group_probs.at2(g, c) > group_probs.at2(g, best_cls)) best_cls = c;
    p.activity = static_cast<int>(best_cls);
    p.confidence = group_probs.at2(g, best_cls);
    preds.push_back(std::move(p));
  }
  return preds;
}

}  // namespace gad
