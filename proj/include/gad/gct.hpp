#pragma once

#include <utility>
#include <vector>

#include "gad/backbone.hpp"
#include "gad/nn.hpp"

namespace gad {

struct GctConfig {
  std::size_t group_tokens = 7;  // K
  std::size_t frames = 5;        // T
  AttentionConfig attention;     // shared config, weights are per layer

  void validate() const;
};

// Attention weights retained from a forward pass, indexed [frame][head].
// Grouping weights are K×M, contextual weights (M+K)×N.
struct AttentionRecords {
  std::vector<std::vector<Tensor>> grouping;
  std::vector<std::vector<Tensor>> contextual;
};

// Two-layer decoder over actor, group and scene tokens. The first layer
// forms group tokens from actors, the second enriches the joint actor+group
// set with scene context. Attention operates independently per frame.
class GroupContextTransformer {
 public:
  GroupContextTransformer() = default;
  GroupContextTransformer(const GctConfig& cfg, Rng& rng);

  // out = LN(groups + FFN(Attn(groups, actors, actors)))
  Var grouping_layer(const Var& groups, const Var& actors, AttentionWeights* record = nullptr) const;
  // [actors' | groups'] = LN(Z + FFN(Attn(Z, scene, scene))), Z = [actors | groups]
  std::pair<Var, Var> contextual_layer(const Var& actors, const Var& groups, const Var& scene,
                                       AttentionWeights* record = nullptr) const;

  struct Output {
    std::vector<Var> actors_ctx;   // per frame M×D
    std::vector<Var> groups_grp;   // per frame K×D (after the grouping layer)
    std::vector<Var> groups_ctx;   // per frame K×D
    AttentionRecords records;
  };
  Output forward(const std::vector<Var>& actors_per_frame, const std::vector<PatchGrid>& grids,
                 bool record_attention = false) const;

  // Initial group tokens for frame t (a K×D slice of the learnable stack).
  Var initial_groups(std::size_t frame) const;

  void params(ParamList& out, const std::string& prefix);
  const GctConfig& config() const { return cfg_; }

  Parameter group_tokens;  // (T·K)×D, frame-major blocks

 private:
  GctConfig cfg_;
  MultiHeadAttention grouping_attn_, contextual_attn_;
  FeedForward grouping_ffn_, contextual_ffn_;
  LayerNorm grouping_norm_, contextual_norm_;
};

}  // namespace gad
