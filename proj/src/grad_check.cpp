#include "gad/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "gad/errors.hpp"

namespace gad {

GradCheckReport grad_check(const std::function<Var()>& fn, const ParamList& params, double eps) {
  const double f_once = fn().scalar_value();
  const double f_again = fn().scalar_value();
  if (f_once != f_again)
    throw NumericError("grad_check: fn is not deterministic (" + std::to_string(f_once) + " vs " +
                       std::to_string(f_again) + ")");

  for (auto& [name, p] : params) p->zero_grad();
  backward(fn());
  std::vector<Tensor> analytic;
  analytic.reserve(params.size());
  for (auto& [name, p] : params) analytic.push_back(p->grad);

  GradCheckReport report;
  for (std::size_t pi = 0; pi < params.size(); ++pi) {
    Parameter* p = params[pi].second;
    for (std::size_t j = 0; j < p->value.size(); ++j) {
      const double saved = p->value.at(j);
      p->value.at(j) = saved + eps;
      const double f_plus = fn().scalar_value();
      p->value.at(j) = saved - eps;
      const double f_minus = fn().scalar_value();
      p->value.at(j) = saved;
      const double numeric = (f_plus - f_minus) / (2.0 * eps);
      const double a = analytic[pi].at(j);
      const double denom = std::max({std::fabs(a), std::fabs(numeric), 1.0});
      const double rel = std::fabs(a - numeric) / denom;
      ++report.checked;
      if (rel > report.max_rel_err) {
        report.max_rel_err = rel;
        report.worst_param = params[pi].first;
        report.worst_index = j;
      }
    }
  }
  return report;
}

}  // namespace gad
