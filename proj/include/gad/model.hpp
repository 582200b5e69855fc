#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gad/backbone.hpp"
#include "gad/gct.hpp"
#include "gad/heads.hpp"
#include "gad/losses.hpp"

namespace gad {

struct ModelConfig {
  BackboneConfig backbone;
  std::size_t gct_heads = 4;
  std::size_t gct_ffn_hidden = 128;
  std::size_t group_tokens = 7;  // K, shared by prompts and group tokens
  std::size_t frames = 5;        // T
  std::size_t activities = 6;
  std::size_t actions = 6;
  OutlierMode outlier_mode = OutlierMode::token;

  void validate() const;
  GctConfig gct() const;
  HeadConfig heads() const;
};

// Full pipeline: prompt-conditioned backbone → actor/scene tokens →
// two-layer group-context decoder → prediction heads.
class GroupActivityModel {
 public:
  GroupActivityModel(const ModelConfig& cfg, std::uint64_t seed);

  struct ClipInput {
    std::vector<Image> frames;                 // T sampled frames
    std::vector<std::vector<Box>> boxes;       // T×M boxes
  };

  struct Forward {
    std::vector<Var> actor_tokens;  // per frame M×D (RoI-pooled)
    GroupContextTransformer::Output gct;
    Var actors_raw_pooled;      // M×D, pre-decoder (aux supervision input)
    Var actors_ctx_pooled;      // M×D
    Var groups_grp_pooled;      // K×D
    Var groups_ctx_pooled;      // K×D
    Var group_logits;           // final-layer K×(C_g+1)
    Var group_logits_aux;       // grouping-layer head
    Var action_logits;          // M×C_a
    Var affinity;               // final-layer M×(K[+1])
    Var affinity_aux;           // grouping-layer head
    Var actor_embeddings;       // final-layer M×D_e (contrastive input)
  };

  Forward forward(const ClipInput& input, bool record_attention = false) const;
  // Feature-file route: externally computed patch grids replace the backbone.
  Forward forward_with_grids(const std::vector<PatchGrid>& grids,
                             const std::vector<std::vector<Box>>& boxes,
                             bool record_attention = false) const;

  // Loss assembly at a fixed (non-differentiated) matching per layer.
  struct ClipLoss {
    Var total;
    double action = 0.0, group = 0.0, member = 0.0, contrast = 0.0;
  };
  ClipLoss compute_loss(const Forward& fwd, const ClipTargets& gt, const LossConfig& cfg) const;

  ParamList parameters();
  ParamList trainable_parameters();
  std::size_t trainable_size();
  std::size_t total_size();
  void set_frozen(bool frozen);

  const ModelConfig& config() const { return cfg_; }
  const VisionBackbone& backbone() const { return backbone_; }
  VisionBackbone& backbone() { return backbone_; }
  const PromptSet& prompts() const { return prompts_; }
  const GroupContextTransformer& gct() const { return gct_; }
  const PredictionHeads& heads() const { return heads_; }

 private:
  ModelConfig cfg_;
  VisionBackbone backbone_;
  PromptSet prompts_;
  GroupContextTransformer gct_;
  PredictionHeads heads_;
};

// Eval-time outputs derived from a forward pass.
struct ClipPrediction {
  std::vector<int> assignment;  // per actor, token index or kOutlier
  std::vector<int> actions;     // per actor
  std::vector<GroupPrediction> groups;
};

ClipPrediction predict_from_forward(const GroupActivityModel::Forward& fwd, const HeadConfig& cfg);

}  // namespace gad
