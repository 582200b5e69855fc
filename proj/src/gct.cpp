#include "gad/gct.hpp"

#include "gad/errors.hpp"

namespace gad {

void GctConfig::validate() const {
  if (group_tokens == 0) throw ConfigError("GctConfig: group_tokens must be positive");
  if (frames == 0) throw ConfigError("GctConfig: frames must be positive");
  attention.validate();
}

GroupContextTransformer::GroupContextTransformer(const GctConfig& cfg, Rng& rng) : cfg_(cfg) {
  cfg_.validate();
  Tensor init({cfg_.frames * cfg_.group_tokens, cfg_.attention.model_dim});
  for (std::size_t i = 0; i < init.size(); ++i) init.at(i) = rng.normal(0.0, 0.02);
  group_tokens = Parameter(std::move(init));
  grouping_attn_ = MultiHeadAttention(cfg_.attention, rng);
  grouping_ffn_ = FeedForward(cfg_.attention.model_dim, cfg_.attention.ffn_hidden, rng);
  grouping_norm_ = LayerNorm(cfg_.attention.model_dim);
  contextual_attn_ = MultiHeadAttention(cfg_.attention, rng);
  contextual_ffn_ = FeedForward(cfg_.attention.model_dim, cfg_.attention.ffn_hidden, rng);
  contextual_norm_ = LayerNorm(cfg_.attention.model_dim);
}

Var GroupContextTransformer::grouping_layer(const Var& groups, const Var& actors,
                                            AttentionWeights* record) const {
  if (actors.value().rows() == 0)
    throw DataError("grouping layer: empty scene (no actor tokens)");
  const Var attended = grouping_attn_.forward(groups, actors, actors, record);
  return grouping_norm_.forward(add(groups, grouping_ffn_.forward(attended)));
}

std::pair<Var, Var> GroupContextTransformer::contextual_layer(const Var& actors, const Var& groups,
                                                              const Var& scene,
                                                              AttentionWeights* record) const {
  const std::size_t actor_count = actors.value().rows();
  const std::size_t group_count = groups.value().rows();
  const Var joint = concat_rows({actors, groups});
  const Var attended = contextual_attn_.forward(joint, scene, scene, record);
  const Var out = contextual_norm_.forward(add(joint, contextual_ffn_.forward(attended)));
  return {slice_rows(out, 0, actor_count),
          slice_rows(out, actor_count, actor_count + group_count)};
}

Var GroupContextTransformer::initial_groups(std::size_t frame) const {
  const std::size_t k = cfg_.group_tokens;
  return slice_rows(Var::leaf(const_cast<Parameter&>(group_tokens)), frame * k, (frame + 1) * k);
}

GroupContextTransformer::Output GroupContextTransformer::forward(
    const std::vector<Var>& actors_per_frame, const std::vector<PatchGrid>& grids,
    bool record_attention) const {
  if (actors_per_frame.size() != cfg_.frames)
    throw DataError("gct: expected " + std::to_string(cfg_.frames) + " frames of actor tokens, got " +
                    std::to_string(actors_per_frame.size()));
  if (grids.size() != cfg_.frames)
    throw DataError("gct: frame-count mismatch between actor tokens and patch grids");
  Output out;
  for (std::size_t t = 0; t < cfg_.frames; ++t) {
    AttentionWeights grouping_rec, contextual_rec;
    const Var g_init = initial_groups(t);
    const Var g_grp = grouping_layer(g_init, actors_per_frame[t],
                                     record_attention ? &grouping_rec : nullptr);
    auto [a_ctx, g_ctx] = contextual_layer(actors_per_frame[t], g_grp, grids[t].tokens,
                                           record_attention ? &contextual_rec : nullptr);
    out.groups_grp.push_back(g_grp);
    out.actors_ctx.push_back(a_ctx);
    out.groups_ctx.push_back(g_ctx);
    if (record_attention) {
      out.records.grouping.push_back(std::move(grouping_rec.per_head));
      out.records.contextual.push_back(std::move(contextual_rec.per_head));
    }
  }
  return out;
}

void GroupContextTransformer::params(ParamList& out, const std::string& prefix) {
  out.emplace_back(prefix + ".group_tokens", &group_tokens);
  grouping_attn_.params(out, prefix + ".grouping.attn");
  grouping_ffn_.params(out, prefix + ".grouping.ffn");
  grouping_norm_.params(out, prefix + ".grouping.norm");
  contextual_attn_.params(out, prefix + ".contextual.attn");
  contextual_ffn_.params(out, prefix + ".contextual.ffn");
  contextual_norm_.params(out, prefix + ".contextual.norm");
}

}  // namespace gad
