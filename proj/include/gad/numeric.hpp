#pragma once

#include <vector>

namespace gad {

// Plain (non-recorded) numeric ops used by the CLI, bindings and tests.

// Probability vector: entries in (0,1], sum 1, shift-invariant.
std::vector<double> softmax(const std::vector<double>& v);

// Row-wise layer normalization of a single vector.
std::vector<double> layer_norm(const std::vector<double>& x, const std::vector<double>& gamma,
                               const std::vector<double>& beta, double epsilon);

// −log softmax(logits)[target]
double cross_entropy(const std::vector<double>& logits, int target);

}  // namespace gad
