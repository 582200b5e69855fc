#include "gad/optim.hpp"

#include <cmath>

namespace gad {

AdamW::AdamW(ParamList params, OptimConfig cfg) : params_(std::move(params)), cfg_(cfg) {
  m_.reserve(params_.size());
  v_.reserve(params_.size());
  for (auto& [name, p] : params_) {
    m_.emplace_back(p->value.shape(), 0.0);
    v_.emplace_back(p->value.shape(), 0.0);
  }
}

void AdamW::step() {
  ++step_count_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(step_count_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(step_count_));
  for (std::size_t i = 0; i < params_.size(); ++i) {
    Parameter* p = params_[i].second;
    if (!p->trainable) continue;
    Tensor& m = m_[i];
    Tensor& v = v_[i];
    for (std::size_t j = 0; j < p->value.size(); ++j) {
      const double g = p->grad.at(j);
      m.at(j) = cfg_.beta1 * m.at(j) + (1.0 - cfg_.beta1) * g;
      v.at(j) = cfg_.beta2 * v.at(j) + (1.0 - cfg_.beta2) * g * g;
      const double m_hat = m.at(j) / bc1;
      const double v_hat = v.at(j) / bc2;
      p->value.at(j) -=
          cfg_.lr * (m_hat / (std::sqrt(v_hat) + cfg_.epsilon) + cfg_.weight_decay * p->value.at(j));
    }
  }
}

void AdamW::zero_grad() {
  for (auto& [name, p] : params_) p->zero_grad();
}

}  // namespace gad
