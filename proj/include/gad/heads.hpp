#pragma once

#include <string>
#include <vector>

#include "gad/autodiff.hpp"
#include "gad/nn.hpp"
#include "gad/rng.hpp"

namespace gad {

// How singleton actors are represented at the head level. `token` adds a
// learnable outlier column to the affinity matrix; `background` relies on
// actors landing on background-classified group tokens.
enum class OutlierMode { token, background };

OutlierMode parse_outlier_mode(const std::string& s);
std::string to_string(OutlierMode m);

struct HeadConfig {
  std::size_t model_dim = 32;
  std::size_t embed_dim = 32;      // shared membership space
  std::size_t activities = 6;      // group activity classes (background excluded)
  std::size_t actions = 6;         // individual action classes
  std::size_t group_tokens = 7;    // K
  OutlierMode outlier_mode = OutlierMode::token;

  void validate() const;
  std::size_t background_class() const { return activities; }  // last group-head column
  std::size_t affinity_cols() const {
    return outlier_mode == OutlierMode::token ? group_tokens + 1 : group_tokens;
  }
};

// One predicted group: disjoint member set, activity class, confidence.
struct GroupPrediction {
  std::vector<int> members;  // sorted actor indices
  int activity = 0;
  double confidence = 0.0;
};

// Linear heads over temporally pooled tokens plus the shared membership
// embedding space with scaled dot-product affinities.
class PredictionHeads {
 public:
  PredictionHeads() = default;
  PredictionHeads(const HeadConfig& cfg, Rng& rng);

  Var group_logits(const Var& groups) const;      // K×(C_g+1)
  Var action_logits(const Var& actors) const;     // M×C_a
  Var actor_embeddings(const Var& actors) const;  // M×D_e
  // Group-token embeddings; in token mode row K is the projected outlier token.
  Var group_embeddings(const Var& groups) const;
  // entry (i,k) = ⟨proj_a(a_i), proj_g(g_k)⟩ / √D_e
  Var membership_affinity(const Var& actors, const Var& groups) const;

  void params(ParamList& out, const std::string& prefix);
  const HeadConfig& config() const { return cfg_; }

 private:
  HeadConfig cfg_;
  Linear group_activity_;
  Linear actor_action_;
  Linear actor_proj_;
  Linear group_proj_;
  Parameter outlier_token_;  // 1×D
};

// Mean over the frame axis of per-frame token matrices.
Var temporal_pool(const std::vector<Var>& per_frame);

constexpr int kOutlier = -1;

// Row-wise argmax assignment with ties broken toward the lowest column.
// Actors whose best column is the outlier column, or whose best group token
// is classified as background, are predicted outliers.
std::vector<int> assign_actors(const Tensor& affinity, const Tensor& group_probs,
                               const HeadConfig& cfg);

// One prediction per non-background token with at least one assigned actor.
std::vector<GroupPrediction> build_group_predictions(const std::vector<int>& assignment,
                                                     const Tensor& group_probs,
                                                     const HeadConfig& cfg);

// Row-wise softmax of a plain tensor (utility for turning logits into probs).
Tensor softmax_rows_tensor(const Tensor& logits);

}  // namespace gad
