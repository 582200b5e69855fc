#pragma once

#include <vector>

#include "gad/autodiff.hpp"
#include "gad/heads.hpp"
#include "gad/tensor.hpp"

namespace gad {

struct LossConfig {
  double lambda_m = 5.0;
  double lambda_c = 2.0;
  double tau = 0.2;
  bool aux_layers = true;

  void validate() const;
};

// Minimum-cost injective assignment of min(n,m) pairs. row_to_col holds -1
// for unassigned rows; among all minimizers the lexicographically smallest
// (by (row, col) pairs in row order) is returned. total_cost is the sum of
// the chosen entries in row order.
struct Assignment {
  std::vector<int> row_to_col;
  double total_cost = 0.0;
};

Assignment hungarian(const std::vector<std::vector<double>>& cost);

// Per-clip ground truth in actor-index space.
struct ClipTargets {
  std::vector<std::vector<int>> groups;  // member actor indices, disjoint, non-empty
  std::vector<int> activities;           // per group
  std::vector<int> singletons;           // actors in no group
  std::vector<int> actions;              // per actor
};

// Injective map from ground-truth group index to group-token index; tokens
// left unmatched are supervised as background.
struct GroupMatching {
  std::vector<int> group_to_token;
};

// cost(g, k) = −p_k(class_g) − (1/|g|)·Σ_{i∈g} σ_i[k], solved by hungarian.
// group_probs: K×(C_g+1) row softmax; affinity_probs: M×cols row softmax.
GroupMatching match_groups(const Tensor& group_probs, const Tensor& affinity_probs,
                           const ClipTargets& gt);

// Cross entropy of every group token: matched tokens against their group's
// activity, unmatched tokens against the background class; mean over K.
Var group_activity_loss(const Var& group_logits, const GroupMatching& matching,
                        const ClipTargets& gt, std::size_t background_class);

// Mean cross entropy over actors.
Var action_loss(const Var& action_logits, const ClipTargets& gt);

// Mean CE over actors of the affinity-row softmax against the matched column
// (outlier column for singletons in token mode; singletons are skipped in
// background mode).
Var membership_loss(const Var& affinity, const GroupMatching& matching, const ClipTargets& gt,
                    const HeadConfig& heads);

// Supervised contrastive consistency over actor embeddings with cosine
// similarity at temperature tau. Actors without a same-group peer are
// skipped; returns 0 when no anchor exists.
Var contrastive_loss(const Var& embeddings, const ClipTargets& gt, double tau);

struct LossParts {
  Var action;                       // L_ind
  std::vector<Var> group_per_layer; // L_group, one per supervised layer
  std::vector<Var> member_per_layer;// L_mem, one per supervised layer
  Var contrast;                     // L_con
};

// action + Σ group + λ_m·Σ member + λ_c·contrast
Var total_loss(const LossParts& parts, const LossConfig& cfg);

}  // namespace gad
