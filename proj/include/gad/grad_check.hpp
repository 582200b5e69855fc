#pragma once

#include <functional>
#include <string>

#include "gad/autodiff.hpp"
#include "gad/tensor.hpp"

namespace gad {

struct GradCheckReport {
  double max_rel_err = 0.0;
  std::string worst_param;
  std::size_t worst_index = 0;
  std::size_t checked = 0;
};

// Compares analytic gradients of a deterministic scalar-valued map against
// central finite differences, elementwise over every listed parameter.
// Relative error uses max(|analytic|, |numeric|, 1) as denominator. Throws
// NumericError if repeated evaluation of `fn` disagrees (non-determinism).
GradCheckReport grad_check(const std::function<Var()>& fn, const ParamList& params,
                           double eps = 1e-5);

}  // namespace gad
