#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "gad/data.hpp"
#include "gad/losses.hpp"
#include "gad/model.hpp"
#include "gad/optim.hpp"

namespace gad {

// Flat key/value run configuration. Defaults carry the reference
// hyperparameters (λ_m=5, λ_c=2, τ=0.2, K=7, T=5, 30 epochs, batch 32);
// CLI flags override file values.
struct RunConfig {
  std::uint64_t seed = 0;

  // backbone
  std::size_t image_size = 32;
  std::size_t patch_size = 4;
  std::size_t channels = 3;
  std::size_t backbone_layers = 4;
  std::size_t model_dim = 32;
  std::size_t backbone_heads = 4;
  std::size_t backbone_ffn_hidden = 128;
  std::string prompt_mode = "deep";
  bool frozen = true;

  // decoder + heads
  std::size_t gct_heads = 4;
  std::size_t gct_ffn_hidden = 128;
  std::size_t group_tokens = 7;  // K
  std::size_t frames = 5;        // T
  std::size_t activities = 6;
  std::size_t actions = 6;
  std::string outlier_mode = "token";

  // optimization
  std::size_t epochs = 30;
  std::size_t batch_size = 32;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_epsilon = 1e-8;
  double weight_decay = 0.0;
  std::size_t checkpoint_every = 0;  // 0 = final checkpoint only

  // losses
  double lambda_m = 5.0;
  double lambda_c = 2.0;
  double tau = 0.2;
  bool aux_layers = true;

  // evaluation
  std::vector<double> thresholds = {0.5, 1.0};

  // synthetic data
  SyntheticConfig synthetic;

  ModelConfig model() const;
  OptimConfig optim() const;
  LossConfig losses() const;
  void validate() const;
};

RunConfig parse_config_file(const std::string& path);
void apply_config_line(RunConfig& cfg, const std::string& key, const std::string& value);
void echo_config(const RunConfig& cfg, std::ostream& os);
void write_config(const RunConfig& cfg, const std::string& path);

std::vector<double> parse_thresholds(const std::string& csv);

}  // namespace gad
