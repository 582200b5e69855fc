#include "gad/backbone.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "gad/errors.hpp"

namespace gad {

PromptMode parse_prompt_mode(const std::string& s) {
  if (s == "none") return PromptMode::none;
  if (s == "shallow") return PromptMode::shallow;
  if (s == "deep") return PromptMode::deep;
  throw ConfigError("unknown prompt mode '" + s + "' (expected none|shallow|deep)");
}

std::string to_string(PromptMode m) {
  switch (m) {
    case PromptMode::none: return "none";
    case PromptMode::shallow: return "shallow";
    case PromptMode::deep: return "deep";
  }
  return "?";
}

void BackboneConfig::validate() const {
  if (image_size == 0 || patch_size == 0 || layers == 0 || model_dim == 0)
    throw ConfigError("BackboneConfig: dimensions must be positive");
  if (image_size % patch_size != 0)
    throw ConfigError("BackboneConfig: image_size must be divisible by patch_size");
  attention().validate();
}

void PromptSet::params(ParamList& out, const std::string& prefix) {
  for (std::size_t l = 0; l < layers.size(); ++l)
    out.emplace_back(prefix + ".layer" + std::to_string(l), &layers[l]);
}

VisionBackbone::VisionBackbone(const BackboneConfig& cfg, Rng& rng) : cfg_(cfg) {
  cfg_.validate();
  patch_proj_ = Linear(cfg_.patch_dim(), cfg_.model_dim, rng);
  Tensor pos({cfg_.patch_tokens(), cfg_.model_dim});
  for (std::size_t i = 0; i < pos.size(); ++i) pos.at(i) = rng.normal(0.0, 0.02);
  pos_embedding_ = Parameter(std::move(pos));
  blocks_.reserve(cfg_.layers);
  for (std::size_t l = 0; l < cfg_.layers; ++l) {
    Block b;
    b.ln1 = LayerNorm(cfg_.model_dim);
    b.ln2 = LayerNorm(cfg_.model_dim);
    b.attn = MultiHeadAttention(cfg_.attention(), rng);
    b.ffn = FeedForward(cfg_.model_dim, cfg_.ffn_hidden, rng);
    blocks_.push_back(std::move(b));
  }
  final_norm_ = LayerNorm(cfg_.model_dim);
  set_frozen(cfg_.frozen);
}

Var VisionBackbone::embed_patches(const Image& frame) const {
  if (frame.width != cfg_.image_size || frame.height != cfg_.image_size ||
      frame.channels != cfg_.channels)
    throw DataError("backbone: frame dimensions " + std::to_string(frame.width) + "x" +
                    std::to_string(frame.height) + "x" + std::to_string(frame.channels) +
                    " do not match config");
  const std::size_t g = cfg_.grid_extent(), p = cfg_.patch_size, ch = cfg_.channels;
  Tensor patches({cfg_.patch_tokens(), cfg_.patch_dim()});
  for (std::size_t gy = 0; gy < g; ++gy) {
    for (std::size_t gx = 0; gx < g; ++gx) {
      const std::size_t row = gy * g + gx;
      std::size_t idx = 0;
      for (std::size_t py = 0; py < p; ++py)
        for (std::size_t px = 0; px < p; ++px)
          for (std::size_t c = 0; c < ch; ++c, ++idx)
            patches.at2(row, idx) =
                static_cast<double>(frame.at(gx * p + px, gy * p + py, c)) / 255.0;
    }
  }
  return patch_proj_.forward(Var::constant(std::move(patches)));
}

Var VisionBackbone::patchify(const Image& frame) const {
  return add(embed_patches(frame), Var::leaf(const_cast<Parameter&>(pos_embedding_)));
}

Var VisionBackbone::block_forward(const Block& b, const Var& x) const {
  const Var normed = b.ln1.forward(x);
  const Var after_attn = add(x, b.attn.forward(normed, normed, normed));
  return add(after_attn, b.ffn.forward(b.ln2.forward(after_attn)));
}

PatchGrid VisionBackbone::forward(const Image& frame, const PromptSet& prompts) const {
  const std::size_t k = cfg_.prompt_mode == PromptMode::none ? 0 : cfg_.prompt_count;
  const std::size_t expected_sets =
      k == 0 ? 0 : (cfg_.prompt_mode == PromptMode::deep ? cfg_.layers : 1);
  if (prompts.layers.size() != expected_sets)
    throw ConfigError("backbone: prompt set has " + std::to_string(prompts.layers.size()) +
                      " matrices, mode " + to_string(cfg_.prompt_mode) + " expects " +
                      std::to_string(expected_sets));

  Var x = patchify(frame);
  const std::size_t n = cfg_.patch_tokens();
  for (std::size_t l = 0; l < cfg_.layers; ++l) {
    if (k > 0 && cfg_.prompt_mode == PromptMode::deep) {
      // Previous prompt positions are discarded; fresh prompts per layer.
      const Var patch_part = l == 0 ? x : slice_rows(x, k, k + n);
      x = concat_rows({Var::leaf(const_cast<Parameter&>(prompts.layers[l])), patch_part});
    } else if (k > 0 && cfg_.prompt_mode == PromptMode::shallow && l == 0) {
      x = concat_rows({Var::leaf(const_cast<Parameter&>(prompts.layers[0])), x});
    }
    x = block_forward(blocks_[l], x);
  }
  if (k > 0) x = slice_rows(x, k, k + n);
  x = final_norm_.forward(x);
  return PatchGrid{x, cfg_.grid_extent(), cfg_.grid_extent()};
}

PromptSet VisionBackbone::make_prompts(Rng& rng) const {
  PromptSet set;
  const std::size_t k = cfg_.prompt_mode == PromptMode::none ? 0 : cfg_.prompt_count;
  if (k == 0) return set;
  const std::size_t count = cfg_.prompt_mode == PromptMode::deep ? cfg_.layers : 1;
  for (std::size_t l = 0; l < count; ++l) {
    Tensor t({k, cfg_.model_dim});
    for (std::size_t i = 0; i < t.size(); ++i) t.at(i) = rng.normal(0.0, 0.02);
    set.layers.emplace_back(std::move(t), /*trainable=*/true);
  }
  return set;
}

void VisionBackbone::params(ParamList& out, const std::string& prefix) {
  patch_proj_.params(out, prefix + ".patch_proj");
  out.emplace_back(prefix + ".pos_embedding", &pos_embedding_);
  for (std::size_t l = 0; l < blocks_.size(); ++l) {
    const std::string bp = prefix + ".block" + std::to_string(l);
    blocks_[l].ln1.params(out, bp + ".ln1");
    blocks_[l].attn.params(out, bp + ".attn");
    blocks_[l].ln2.params(out, bp + ".ln2");
    blocks_[l].ffn.params(out, bp + ".ffn");
  }
  final_norm_.params(out, prefix + ".final_norm");
}

void VisionBackbone::set_frozen(bool frozen) {
  cfg_.frozen = frozen;
  ParamList list;
  params(list, "backbone");
  for (auto& [name, p] : list) p->trainable = !frozen;
}

std::vector<WeightedRow> roi_sample_weights(std::size_t grid_rows, std::size_t grid_cols,
                                            const Box& box) {
  if (!box.valid())
    throw DataError("roi_pool_1x1: degenerate or out-of-range box");
  std::map<std::size_t, double> acc;  // ordered for determinism
  const double offsets[2] = {0.25, 0.75};
  for (double fy : offsets) {
    for (double fx : offsets) {
      const double px = box.x0 + fx * box.width();
      const double py = box.y0 + fy * box.height();
      // patch centers sit at (i + 0.5) / extent in normalized coordinates
      double gx = px * static_cast<double>(grid_cols) - 0.5;
      double gy = py * static_cast<double>(grid_rows) - 0.5;
      gx = std::clamp(gx, 0.0, static_cast<double>(grid_cols - 1));
      gy = std::clamp(gy, 0.0, static_cast<double>(grid_rows - 1));
      const std::size_t x0 = static_cast<std::size_t>(gx);
      const std::size_t y0 = static_cast<std::size_t>(gy);
      const std::size_t x1 = std::min(x0 + 1, grid_cols - 1);
      const std::size_t y1 = std::min(y0 + 1, grid_rows - 1);
      const double tx = gx - static_cast<double>(x0);
      const double ty = gy - static_cast<double>(y0);
      acc[y0 * grid_cols + x0] += 0.25 * (1.0 - tx) * (1.0 - ty);
      acc[y0 * grid_cols + x1] += 0.25 * tx * (1.0 - ty);
      acc[y1 * grid_cols + x0] += 0.25 * (1.0 - tx) * ty;
      acc[y1 * grid_cols + x1] += 0.25 * tx * ty;
    }
  }
  std::vector<WeightedRow> entries;
  entries.reserve(acc.size());
  for (const auto& [row, w] : acc) {
    if (w != 0.0) entries.push_back({row, w});
  }
  return entries;
}

Var roi_pool_1x1(const PatchGrid& grid, const Box& box) {
  return gather_weighted_rows(grid.tokens, roi_sample_weights(grid.rows, grid.cols, box));
}

std::vector<Var> extract_actor_tokens(const std::vector<PatchGrid>& grids,
                                      const std::vector<std::vector<Box>>& boxes_per_frame) {
  if (grids.size() != boxes_per_frame.size())
    throw DataError("extract_actor_tokens: frame count mismatch between grids and boxes");
  if (grids.empty()) throw DataError("extract_actor_tokens: no frames");
  const std::size_t actors = boxes_per_frame[0].size();
  if (actors == 0) throw DataError("extract_actor_tokens: clip has no actors");
  std::vector<Var> per_frame;
  per_frame.reserve(grids.size());
  for (std::size_t t = 0; t < grids.size(); ++t) {
    if (boxes_per_frame[t].size() != actors)
      throw DataError("extract_actor_tokens: missing box for a sampled frame (frame " +
                      std::to_string(t) + ")");
    std::vector<Var> rows;
    rows.reserve(actors);
    for (const Box& b : boxes_per_frame[t]) rows.push_back(roi_pool_1x1(grids[t], b));
    per_frame.push_back(actors == 1 ? rows[0] : concat_rows(rows));
  }
  return per_frame;
}

}  // namespace gad
