#include "gad/numeric.hpp"

#include <cmath>
#include <stdexcept>

#include "gad/autodiff.hpp"
#include "gad/errors.hpp"

namespace gad {

std::vector<double> softmax(const std::vector<double>& v) {
  if (v.empty()) throw std::invalid_argument("softmax: empty input");
  for (double x : v) {
    if (!std::isfinite(x)) throw NumericError("softmax: non-finite input");
  }
  std::vector<double> out = v;
  kernels::softmax_inplace(out.data(), out.size());
  return out;
}

std::vector<double> layer_norm(const std::vector<double>& x, const std::vector<double>& gamma,
                               const std::vector<double>& beta, double epsilon) {
  if (x.empty()) throw std::invalid_argument("layer_norm: zero-length input");
  if (gamma.size() != x.size() || beta.size() != x.size())
    throw std::invalid_argument("layer_norm: gamma/beta size mismatch");
  const double n = static_cast<double>(x.size());
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= n;
  double var = 0.0;
  for (double v : x) var += (v - mean) * (v - mean);
  var /= n;
  const double inv_std = 1.0 / std::sqrt(var + epsilon);
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    out[i] = (x[i] - mean) * inv_std * gamma[i] + beta[i];
  return out;
}

double cross_entropy(const std::vector<double>& logits, int target) {
  if (target < 0 || static_cast<std::size_t>(target) >= logits.size())
    throw std::invalid_argument("cross_entropy: target out of range");
  double mx = logits[0];
  for (double v : logits) mx = std::max(mx, v);
  double sum = 0.0;
  for (double v : logits) sum += std::exp(v - mx);
  return std::log(sum) - (logits[static_cast<std::size_t>(target)] - mx);
}

}  // namespace gad
