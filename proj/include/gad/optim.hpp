#pragma once

#include <cstdint>
#include <vector>

#include "gad/tensor.hpp"

namespace gad {

struct OptimConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double weight_decay = 0.0;
};

// Adam with decoupled weight decay. Parameters with trainable == false are
// skipped entirely (value, moments and decay all untouched).
class AdamW {
 public:
  AdamW() = default;
  AdamW(ParamList params, OptimConfig cfg);

  void step();
  void zero_grad();

  std::int64_t step_count() const { return step_count_; }
  const ParamList& params() const { return params_; }

  // Moment access for checkpointing, aligned with params() order.
  Tensor& first_moment(std::size_t i) { return m_[i]; }
  Tensor& second_moment(std::size_t i) { return v_[i]; }
  void set_step_count(std::int64_t t) { step_count_ = t; }

 private:
  ParamList params_;
  OptimConfig cfg_;
  std::vector<Tensor> m_, v_;
  std::int64_t step_count_ = 0;
};

}  // namespace gad
