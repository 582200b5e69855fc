#pragma once

#include <string>
#include <vector>

#include "gad/autodiff.hpp"
#include "gad/image.hpp"
#include "gad/nn.hpp"
#include "gad/rng.hpp"

namespace gad {

enum class PromptMode { none, shallow, deep };

PromptMode parse_prompt_mode(const std::string& s);
std::string to_string(PromptMode m);

struct BackboneConfig {
  std::size_t image_size = 32;
  std::size_t patch_size = 4;
  std::size_t channels = 3;
  std::size_t layers = 4;
  std::size_t model_dim = 32;
  std::size_t heads = 4;
  std::size_t ffn_hidden = 128;
  PromptMode prompt_mode = PromptMode::deep;
  std::size_t prompt_count = 7;
  bool frozen = true;

  void validate() const;
  std::size_t grid_extent() const { return image_size / patch_size; }
  std::size_t patch_tokens() const { return grid_extent() * grid_extent(); }
  std::size_t patch_dim() const { return patch_size * patch_size * channels; }
  AttentionConfig attention() const { return {model_dim, heads, ffn_hidden}; }
};

// Learnable prompt tokens. Deep mode keeps one K×D matrix per encoder layer,
// shallow mode a single input-layer matrix. Always trainable, even when the
// backbone is frozen.
struct PromptSet {
  std::vector<Parameter> layers;

  void params(ParamList& out, const std::string& prefix);
  bool empty() const { return layers.empty(); }
};

// Per-frame patch tokens laid out as a (rows·cols)×D matrix; prompt tokens
// never appear here.
struct PatchGrid {
  Var tokens;
  std::size_t rows = 0;
  std::size_t cols = 0;
};

// Miniature ViT encoder standing in for a frozen foundation backbone.
// Pre-norm blocks; prompt tokens are prepended to the sequence and stripped
// from the output in every mode.
class VisionBackbone {
 public:
  VisionBackbone() = default;
  VisionBackbone(const BackboneConfig& cfg, Rng& rng);

  // Patch projection without positional embedding (locality-testable).
  Var embed_patches(const Image& frame) const;
  // Patch projection plus learned positional embedding.
  Var patchify(const Image& frame) const;
  PatchGrid forward(const Image& frame, const PromptSet& prompts) const;

  PromptSet make_prompts(Rng& rng) const;
  void params(ParamList& out, const std::string& prefix);  // backbone weights only
  void set_frozen(bool frozen);
  const BackboneConfig& config() const { return cfg_; }

 private:
  struct Block {
    LayerNorm ln1, ln2;
    MultiHeadAttention attn;
    FeedForward ffn;
  };
  Var block_forward(const Block& b, const Var& x) const;

  BackboneConfig cfg_;
  Linear patch_proj_;
  Parameter pos_embedding_;  // N×D
  std::vector<Block> blocks_;
  LayerNorm final_norm_;
};

// 1×1 RoI-align: average of 4 bilinear samples at the box quarter points,
// in patch-grid coordinates with clamped borders.
Var roi_pool_1x1(const PatchGrid& grid, const Box& box);

// Sample weights used by roi_pool_1x1, exposed for the pooling op itself.
std::vector<WeightedRow> roi_sample_weights(std::size_t grid_rows, std::size_t grid_cols,
                                            const Box& box);

// Stacks per-actor pooled vectors into one M×D matrix per frame.
std::vector<Var> extract_actor_tokens(const std::vector<PatchGrid>& grids,
                                      const std::vector<std::vector<Box>>& boxes_per_frame);

}  // namespace gad
