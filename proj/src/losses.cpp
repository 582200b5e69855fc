#include "gad/losses.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "gad/errors.hpp"

namespace gad {

void LossConfig::validate() const {
  if (tau <= 0.0) throw ConfigError("LossConfig: tau must be positive");
  if (lambda_m < 0.0 || lambda_c < 0.0)
    throw ConfigError("LossConfig: loss weights must be non-negative");
}

namespace {

using Matrix = std::vector<std::vector<double>>;

constexpr double kInf = std::numeric_limits<double>::infinity();

// Shortest-augmenting-path assignment with potentials; requires rows ≤ cols
// and assigns every row. Total is re-summed over the chosen entries in row
// order so it is bit-identical to an enumeration oracle on the same set.
double sap_solve(const Matrix& cost, std::vector<int>& row_to_col) {
  const std::size_t n = cost.size(), m = cost[0].size();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<std::size_t> p(m + 1, 0), way(m + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(m + 1, kInf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      std::size_t j1 = 0;
      double delta = kInf;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  row_to_col.assign(n, -1);
  for (std::size_t j = 1; j <= m; ++j)
    if (p[j] != 0) row_to_col[p[j] - 1] = static_cast<int>(j - 1);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) total += cost[i][static_cast<std::size_t>(row_to_col[i])];
  return total;
}

// Minimum cost of assigning min(n,m) pairs for any rectangular matrix.
double min_assignment_cost(const Matrix& cost) {
  const std::size_t n = cost.size(), m = cost[0].size();
  std::vector<int> sol;
  if (n <= m) return sap_solve(cost, sol);
  Matrix t(m, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) t[j][i] = cost[i][j];
  return sap_solve(t, sol);
}

// Optimum over rows ≥ first_row and columns not excluded; returns +inf when
// fewer than `pairs_needed` pairs fit.
double reduced_optimum(const Matrix& cost, std::size_t first_row,
                       const std::vector<char>& col_excluded, std::size_t pairs_needed) {
  const std::size_t n = cost.size(), m = cost[0].size();
  std::vector<std::size_t> cols;
  for (std::size_t j = 0; j < m; ++j)
    if (!col_excluded[j]) cols.push_back(j);
  const std::size_t rows_left = n - first_row;
  if (std::min(rows_left, cols.size()) < pairs_needed) return kInf;
  if (pairs_needed == 0) return 0.0;
  Matrix sub(rows_left, std::vector<double>(cols.size()));
  for (std::size_t i = 0; i < rows_left; ++i)
    for (std::size_t j = 0; j < cols.size(); ++j) sub[i][j] = cost[first_row + i][cols[j]];
  return min_assignment_cost(sub);
}

}  // namespace

Assignment hungarian(const Matrix& cost) {
  if (cost.empty() || cost[0].empty()) throw std::invalid_argument("hungarian: empty cost matrix");
  const std::size_t n = cost.size(), m = cost[0].size();
  double max_abs = 0.0;
  for (const auto& row : cost) {
    if (row.size() != m) throw std::invalid_argument("hungarian: ragged cost matrix");
    for (double c : row) {
      if (!std::isfinite(c)) throw std::invalid_argument("hungarian: non-finite cost");
      max_abs = std::max(max_abs, std::fabs(c));
    }
  }
  const std::size_t pairs = std::min(n, m);
  const double tol = 1e-12 * std::max(1.0, max_abs * static_cast<double>(pairs));

  // Fix pairs in (row, col) lexicographic order, keeping the residual problem
  // optimal at every step. Exactness comes from the base solver; this pass
  // only pins the deterministic tie-breaking.
  Assignment out;
  out.row_to_col.assign(n, -1);
  std::vector<char> col_used(m, 0);
  double remaining = min_assignment_cost(cost);
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < n && assigned < pairs; ++i) {
    bool fixed = false;
    for (std::size_t c = 0; c < m; ++c) {
      if (col_used[c]) continue;
      col_used[c] = 1;
      const double sub = reduced_optimum(cost, i + 1, col_used, pairs - assigned - 1);
      col_used[c] = 0;
      if (std::isfinite(sub) && std::fabs(cost[i][c] + sub - remaining) <= tol) {
        out.row_to_col[i] = static_cast<int>(c);
        col_used[c] = 1;
        ++assigned;
        remaining = sub;
        fixed = true;
        break;
      }
    }
    if (!fixed && n <= m)
      throw NumericError("hungarian: internal refinement failure");
  }
  out.total_cost = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    if (out.row_to_col[i] >= 0) out.total_cost += cost[i][static_cast<std::size_t>(out.row_to_col[i])];
  return out;
}

GroupMatching match_groups(const Tensor& group_probs, const Tensor& affinity_probs,
                           const ClipTargets& gt) {
  const std::size_t tokens = group_probs.rows();
  const std::size_t n_groups = gt.groups.size();
  if (n_groups == 0) throw DataError("match_groups: clip has no ground-truth groups");
  if (n_groups > tokens)
    throw ConfigError("match_groups: " + std::to_string(n_groups) + " ground-truth groups exceed " +
                      std::to_string(tokens) + " group tokens");
  Matrix cost(n_groups, std::vector<double>(tokens));
  for (std::size_t g = 0; g < n_groups; ++g) {
    const auto& members = gt.groups[g];
    const auto cls = static_cast<std::size_t>(gt.activities[g]);
    for (std::size_t k = 0; k < tokens; ++k) {
      double mean_affinity = 0.0;
      for (int i : members) mean_affinity += affinity_probs.at2(static_cast<std::size_t>(i), k);
      mean_affinity /= static_cast<double>(members.size());
      cost[g][k] = -group_probs.at2(k, cls) - mean_affinity;
    }
  }
  GroupMatching matching;
  matching.group_to_token = hungarian(cost).row_to_col;
  return matching;
}

Var group_activity_loss(const Var& group_logits, const GroupMatching& matching,
                        const ClipTargets& gt, std::size_t background_class) {
  std::vector<int> targets(group_logits.value().rows(), static_cast<int>(background_class));
  for (std::size_t g = 0; g < matching.group_to_token.size(); ++g) {
    const int token = matching.group_to_token[g];
    if (token >= 0) targets[static_cast<std::size_t>(token)] = gt.activities[g];
  }
  return cross_entropy_mean(group_logits, targets);
}

Var action_loss(const Var& action_logits, const ClipTargets& gt) {
  return cross_entropy_mean(action_logits, gt.actions);
}

Var membership_loss(const Var& affinity, const GroupMatching& matching, const ClipTargets& gt,
                    const HeadConfig& heads) {
  const std::size_t actors = affinity.value().rows();
  std::vector<int> targets(actors, -2);
  for (std::size_t g = 0; g < gt.groups.size(); ++g) {
    for (int i : gt.groups[g]) targets[static_cast<std::size_t>(i)] = matching.group_to_token[g];
  }
  for (int i : gt.singletons) {
    targets[static_cast<std::size_t>(i)] =
        heads.outlier_mode == OutlierMode::token ? static_cast<int>(heads.group_tokens) : -1;
  }
  for (std::size_t i = 0; i < actors; ++i) {
    if (targets[i] == -2)
      throw DataError("membership_loss: actor " + std::to_string(i) +
                      " is in no group and not flagged singleton");
  }
  return cross_entropy_mean(affinity, targets);
}

Var contrastive_loss(const Var& embeddings, const ClipTargets& gt, double tau) {
  const std::size_t actors = embeddings.value().rows();
  if (actors < 2) throw std::invalid_argument("contrastive_loss: fewer than two actors");
  if (tau <= 0.0) throw std::invalid_argument("contrastive_loss: tau must be positive");

  std::vector<int> group_of(actors, -1);
  for (std::size_t g = 0; g < gt.groups.size(); ++g)
    for (int i : gt.groups[g]) group_of[static_cast<std::size_t>(i)] = static_cast<int>(g);

  const Var sims = scale(matmul_nt(l2_normalize_rows(embeddings), l2_normalize_rows(embeddings)),
                         1.0 / tau);
  std::vector<Var> terms;
  for (std::size_t i = 0; i < actors; ++i) {
    if (group_of[i] < 0) continue;  // singletons are not anchors
    std::vector<std::size_t> positives;
    for (std::size_t j = 0; j < actors; ++j)
      if (j != i && group_of[j] == group_of[i]) positives.push_back(j);
    if (positives.empty()) continue;
    const Var row = slice_rows(sims, i, i + 1);
    Tensor self_mask({1, actors}, 0.0);
    self_mask.at(i) = -1e30;  // excludes the anchor from the denominator
    const Var lse = logsumexp_row(add(row, Var::constant(std::move(self_mask))));
    Tensor pos_mask({1, actors}, 0.0);
    for (std::size_t j : positives) pos_mask.at(j) = 1.0 / static_cast<double>(positives.size());
    const Var mean_pos = matmul_nt(row, Var::constant(std::move(pos_mask)));
    terms.push_back(sub(lse, mean_pos));
  }
  if (terms.empty()) return Var::scalar(0.0);
  return mean_all(concat_rows(terms));
}

Var total_loss(const LossParts& parts, const LossConfig& cfg) {
  cfg.validate();
  Var total = parts.action;
  for (const Var& g : parts.group_per_layer) total = add(total, g);
  for (const Var& m : parts.member_per_layer) total = add(total, scale(m, cfg.lambda_m));
  total = add(total, scale(parts.contrast, cfg.lambda_c));
  return total;
}

}  // namespace gad
