#include "gad/model.hpp"

#include "gad/errors.hpp"

namespace gad {

void ModelConfig::validate() const {
  backbone.validate();
  gct().validate();
  heads().validate();
  if (backbone.prompt_count != group_tokens)
    throw ConfigError("ModelConfig: prompt_count is tied to group_tokens (one prompt per group)");
}

GctConfig ModelConfig::gct() const {
  return {group_tokens, frames, {backbone.model_dim, gct_heads, gct_ffn_hidden}};
}

HeadConfig ModelConfig::heads() const {
  HeadConfig h;
  h.model_dim = backbone.model_dim;
  h.embed_dim = backbone.model_dim;
  h.activities = activities;
  h.actions = actions;
  h.group_tokens = group_tokens;
  h.outlier_mode = outlier_mode;
  return h;
}

GroupActivityModel::GroupActivityModel(const ModelConfig& cfg, std::uint64_t seed) : cfg_(cfg) {
  cfg_.validate();
  Rng rng(mix_seed(seed, 0x6d0de1u));
  backbone_ = VisionBackbone(cfg_.backbone, rng);
  prompts_ = backbone_.make_prompts(rng);
  gct_ = GroupContextTransformer(cfg_.gct(), rng);
  heads_ = PredictionHeads(cfg_.heads(), rng);
}

GroupActivityModel::Forward GroupActivityModel::forward(const ClipInput& input,
                                                        bool record_attention) const {
  if (input.frames.size() != cfg_.frames)
    throw DataError("model: expected " + std::to_string(cfg_.frames) + " frames, got " +
                    std::to_string(input.frames.size()));
  std::vector<PatchGrid> grids;
  grids.reserve(input.frames.size());
  for (const Image& frame : input.frames) grids.push_back(backbone_.forward(frame, prompts_));
  return forward_with_grids(grids, input.boxes, record_attention);
}

GroupActivityModel::Forward GroupActivityModel::forward_with_grids(
    const std::vector<PatchGrid>& grids, const std::vector<std::vector<Box>>& boxes,
    bool record_attention) const {
  Forward out;
  out.actor_tokens = extract_actor_tokens(grids, boxes);
  out.gct = gct_.forward(out.actor_tokens, grids, record_attention);
  out.actors_raw_pooled = temporal_pool(out.actor_tokens);
  out.actors_ctx_pooled = temporal_pool(out.gct.actors_ctx);
  out.groups_grp_pooled = temporal_pool(out.gct.groups_grp);
  out.groups_ctx_pooled = temporal_pool(out.gct.groups_ctx);
  out.group_logits = heads_.group_logits(out.groups_ctx_pooled);
  out.group_logits_aux = heads_.group_logits(out.groups_grp_pooled);
  out.action_logits = heads_.action_logits(out.actors_ctx_pooled);
  out.affinity = heads_.membership_affinity(out.actors_ctx_pooled, out.groups_ctx_pooled);
  out.affinity_aux = heads_.membership_affinity(out.actors_raw_pooled, out.groups_grp_pooled);
  out.actor_embeddings = heads_.actor_embeddings(out.actors_ctx_pooled);
  return out;
}

GroupActivityModel::ClipLoss GroupActivityModel::compute_loss(const Forward& fwd,
                                                              const ClipTargets& gt,
                                                              const LossConfig& cfg) const {
  const HeadConfig head_cfg = cfg_.heads();
  LossParts parts;
  parts.action = action_loss(fwd.action_logits, gt);

  struct LayerOutputs {
    const Var* logits;
    const Var* affinity;
  };
  std::vector<LayerOutputs> layers;
  if (cfg.aux_layers) layers.push_back({&fwd.group_logits_aux, &fwd.affinity_aux});
  layers.push_back({&fwd.group_logits, &fwd.affinity});

  for (const LayerOutputs& layer : layers) {
    // matching over detached values; the assignment itself is not differentiated
    const GroupMatching matching = match_groups(softmax_rows_tensor(layer.logits->value()),
                                                softmax_rows_tensor(layer.affinity->value()), gt);
    parts.group_per_layer.push_back(
        group_activity_loss(*layer.logits, matching, gt, head_cfg.background_class()));
    parts.member_per_layer.push_back(membership_loss(*layer.affinity, matching, gt, head_cfg));
  }
  parts.contrast = fwd.actor_embeddings.value().rows() >= 2
                       ? contrastive_loss(fwd.actor_embeddings, gt, cfg.tau)
                       : Var::scalar(0.0);

  ClipLoss loss;
  loss.total = total_loss(parts, cfg);
  loss.action = parts.action.scalar_value();
  for (const Var& g : parts.group_per_layer) loss.group += g.scalar_value();
  for (const Var& m : parts.member_per_layer) loss.member += m.scalar_value();
  loss.contrast = parts.contrast.scalar_value();
  return loss;
}

ParamList GroupActivityModel::parameters() {
  ParamList list;
  backbone_.params(list, "backbone");
  prompts_.params(list, "prompts");
  gct_.params(list, "gct");
  heads_.params(list, "heads");
  return list;
}

ParamList GroupActivityModel::trainable_parameters() {
  ParamList all = parameters(), out;
  for (auto& entry : all)
    if (entry.second->trainable) out.push_back(entry);
  return out;
}

std::size_t GroupActivityModel::trainable_size() {
  std::size_t n = 0;
  for (auto& [name, p] : trainable_parameters()) n += p->size();
  return n;
}

std::size_t GroupActivityModel::total_size() {
  std::size_t n = 0;
  for (auto& [name, p] : parameters()) n += p->size();
  return n;
}

void GroupActivityModel::set_frozen(bool frozen) { backbone_.set_frozen(frozen); }

ClipPrediction predict_from_forward(const GroupActivityModel::Forward& fwd, const HeadConfig& cfg) {
  ClipPrediction pred;
  const Tensor group_probs = softmax_rows_tensor(fwd.group_logits.value());
  pred.assignment = assign_actors(fwd.affinity.value(), group_probs, cfg);
  pred.groups = build_group_predictions(pred.assignment, group_probs, cfg);
  const Tensor& action = fwd.action_logits.value();
  for (std::size_t i = 0; i < action.rows(); ++i) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < action.cols(); ++c)
      if (action.at2(i, c) > action.at2(i, best)) best = c;
    pred.actions.push_back(static_cast<int>(best));
  }
  return pred;
}

}  // namespace gad
