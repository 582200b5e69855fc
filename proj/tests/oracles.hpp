// Independent reference implementations used to freeze expected values.
// Everything here is deliberately straight-line and separate from the
// library's code paths.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <set>
#include <vector>

#include "gad/metrics.hpp"
#include "gad/tensor.hpp"

namespace oracle {

using Matrix = std::vector<std::vector<double>>;

inline Matrix to_matrix(const gad::Tensor& t) {
  Matrix m(t.rows(), std::vector<double>(t.cols()));
  for (std::size_t r = 0; r < t.rows(); ++r)
    for (std::size_t c = 0; c < t.cols(); ++c) m[r][c] = t.at2(r, c);
  return m;
}

inline Matrix matmul(const Matrix& a, const Matrix& b) {
  Matrix c(a.size(), std::vector<double>(b[0].size(), 0.0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t k = 0; k < b.size(); ++k)
      for (std::size_t j = 0; j < b[0].size(); ++j) c[i][j] += a[i][k] * b[k][j];
  return c;
}

inline std::vector<double> softmax(std::vector<double> v) {
  const double mx = *std::max_element(v.begin(), v.end());
  double sum = 0.0;
  for (double& x : v) {
    x = std::exp(x - mx);
    sum += x;
  }
  for (double& x : v) x /= sum;
  return v;
}

// Dense single-head attention: out = softmax(QWq+bq)(KWk+bk)ᵀ/√d)(VWv+bv)Wo+bo
inline Matrix attention_1head(const Matrix& q, const Matrix& k, const Matrix& v, const Matrix& wq,
                              const std::vector<double>& bq, const Matrix& wk,
                              const std::vector<double>& bk, const Matrix& wv,
                              const std::vector<double>& bv, const Matrix& wo,
                              const std::vector<double>& bo) {
  auto project = [](const Matrix& x, const Matrix& w, const std::vector<double>& b) {
    Matrix out = matmul(x, w);
    for (auto& row : out)
      for (std::size_t j = 0; j < row.size(); ++j) row[j] += b[j];
    return out;
  };
  const Matrix qp = project(q, wq, bq), kp = project(k, wk, bk), vp = project(v, wv, bv);
  const double scale = 1.0 / std::sqrt(static_cast<double>(qp[0].size()));
  Matrix attended(qp.size(), std::vector<double>(vp[0].size(), 0.0));
  for (std::size_t i = 0; i < qp.size(); ++i) {
    std::vector<double> logits(kp.size());
    for (std::size_t j = 0; j < kp.size(); ++j) {
      double dot = 0.0;
      for (std::size_t d = 0; d < qp[0].size(); ++d) dot += qp[i][d] * kp[j][d];
      logits[j] = dot * scale;
    }
    const std::vector<double> weights = softmax(logits);
    for (std::size_t j = 0; j < kp.size(); ++j)
      for (std::size_t d = 0; d < vp[0].size(); ++d) attended[i][d] += weights[j] * vp[j][d];
  }
  return project(attended, wo, bo);
}

// Exhaustive min-cost assignment of min(n,m) pairs; totals summed in row order.
inline double min_assignment(const Matrix& cost) {
  const std::size_t n = cost.size(), m = cost[0].size();
  double best = std::numeric_limits<double>::infinity();
  if (n <= m) {
    std::vector<int> cols(m);
    std::iota(cols.begin(), cols.end(), 0);
    do {
      double total = 0.0;
      for (std::size_t i = 0; i < n; ++i) total += cost[i][static_cast<std::size_t>(cols[i])];
      best = std::min(best, total);
    } while (std::next_permutation(cols.begin(), cols.end()));
  } else {
    std::vector<int> rows(n);
    std::iota(rows.begin(), rows.end(), 0);
    do {
      double total = 0.0;
      for (std::size_t j = 0; j < m; ++j) total += cost[static_cast<std::size_t>(rows[j])][j];
      best = std::min(best, total);
    } while (std::next_permutation(rows.begin(), rows.end()));
  }
  return best;
}

// Lexicographically smallest optimal assignment by explicit enumeration.
inline std::vector<int> lex_min_assignment(const Matrix& cost) {
  const std::size_t n = cost.size(), m = cost[0].size();
  const std::size_t pairs = std::min(n, m);
  const double best = min_assignment(cost);
  const double tol = 1e-12 * std::max<double>(1.0, static_cast<double>(pairs));
  std::vector<int> current(n, -1), winner;
  std::vector<bool> used(m, false);
  std::function<void(std::size_t, std::size_t, double)> rec = [&](std::size_t row,
                                                                  std::size_t taken, double sum) {
    if (!winner.empty()) return;  // enumeration order is lexicographic; first hit wins
    if (taken == pairs) {
      if (std::fabs(sum - best) <= tol) winner = current;
      return;
    }
    if (row >= n) return;
    if (n - row < pairs - taken) return;
    for (std::size_t c = 0; c < m && winner.empty(); ++c) {
      if (used[c]) continue;
      used[c] = true;
      current[row] = static_cast<int>(c);
      rec(row + 1, taken + 1, sum + cost[row][c]);
      current[row] = -1;
      used[c] = false;
    }
    if (n - row - 1 >= pairs - taken) rec(row + 1, taken, sum);  // leave this row unassigned
  };
  rec(0, 0, 0.0);
  return winner;
}

inline double set_iou(const std::vector<int>& a, const std::vector<int>& b) {
  const std::set<int> sa(a.begin(), a.end()), sb(b.begin(), b.end());
  if (sa.empty() && sb.empty()) return 1.0;
  std::size_t inter = 0;
  for (int x : sa) inter += sb.count(x);
  return static_cast<double>(inter) / static_cast<double>(sa.size() + sb.size() - inter);
}

// Maximum bipartite matching size by exhaustive search over the edge set
// {(pred, gt) : IoU ≥ threshold, same class, same clip}.
struct MapCandidate {
  std::size_t record;
  std::vector<int> members;
  double confidence;
};

inline std::size_t max_matching(const std::vector<std::vector<int>>& adj, std::size_t gt_count) {
  // recursive augmenting-path matching: exhaustive and independent of ranking
  std::vector<int> match_gt(gt_count, -1);
  std::function<bool(std::size_t, std::vector<bool>&)> try_one =
      [&](std::size_t p, std::vector<bool>& seen) {
        for (int g : adj[p]) {
          if (seen[static_cast<std::size_t>(g)]) continue;
          seen[static_cast<std::size_t>(g)] = true;
          if (match_gt[static_cast<std::size_t>(g)] < 0 ||
              try_one(static_cast<std::size_t>(match_gt[static_cast<std::size_t>(g)]), seen)) {
            match_gt[static_cast<std::size_t>(g)] = static_cast<int>(p);
            return true;
          }
        }
        return false;
      };
  std::size_t size = 0;
  for (std::size_t p = 0; p < adj.size(); ++p) {
    std::vector<bool> seen(gt_count, false);
    if (try_one(p, seen)) ++size;
  }
  return size;
}

// Brute-force Group mAP: per class, rank predictions (confidence desc, clip
// id asc, member set asc), then compute the per-prefix maximum-matching TP
// counts and take the area under the interpolated precision envelope.
inline double brute_force_group_map(const std::vector<gad::EvalRecord>& records, double threshold,
                                    std::size_t num_classes) {
  std::vector<std::size_t> order(records.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return records[a].clip_id < records[b].clip_id;
  });
  double ap_sum = 0.0;
  std::size_t class_count = 0;
  for (std::size_t cls = 0; cls < num_classes; ++cls) {
    std::vector<MapCandidate> ranked;
    struct GtRef {
      std::size_t record;
      std::vector<int> members;
    };
    std::vector<GtRef> gts;
    for (std::size_t oi = 0; oi < order.size(); ++oi) {
      const gad::EvalRecord& rec = records[order[oi]];
      for (std::size_t g = 0; g < rec.gt_groups.size(); ++g)
        if (rec.gt_activities[g] == static_cast<int>(cls)) gts.push_back({oi, rec.gt_groups[g]});
      for (const gad::GroupPrediction& p : rec.predictions) {
        if (p.activity != static_cast<int>(cls)) continue;
        std::vector<int> members = p.members;
        std::sort(members.begin(), members.end());
        ranked.push_back({oi, std::move(members), p.confidence});
      }
    }
    if (gts.empty()) continue;
    ++class_count;
    std::sort(ranked.begin(), ranked.end(), [](const MapCandidate& a, const MapCandidate& b) {
      if (a.confidence != b.confidence) return a.confidence > b.confidence;
      if (a.record != b.record) return a.record < b.record;
      return a.members < b.members;
    });
    std::vector<std::vector<int>> adj(ranked.size());
    for (std::size_t p = 0; p < ranked.size(); ++p)
      for (std::size_t g = 0; g < gts.size(); ++g)
        if (gts[g].record == ranked[p].record &&
            set_iou(ranked[p].members, gts[g].members) >= threshold)
          adj[p].push_back(static_cast<int>(g));
    std::vector<double> precision, recall;
    for (std::size_t prefix = 1; prefix <= ranked.size(); ++prefix) {
      const std::vector<std::vector<int>> prefix_adj(adj.begin(),
                                                     adj.begin() + static_cast<long>(prefix));
      const std::size_t tp = max_matching(prefix_adj, gts.size());
      precision.push_back(static_cast<double>(tp) / static_cast<double>(prefix));
      recall.push_back(static_cast<double>(tp) / static_cast<double>(gts.size()));
    }
    for (std::size_t i = precision.size(); i-- > 1;)
      precision[i - 1] = std::max(precision[i - 1], precision[i]);
    double ap = 0.0, prev = 0.0;
    for (std::size_t i = 0; i < precision.size(); ++i) {
      ap += (recall[i] - prev) * precision[i];
      prev = recall[i];
    }
    ap_sum += ap;
  }
  return class_count == 0 ? 0.0 : ap_sum / static_cast<double>(class_count);
}

// Best injective gt→prediction map by enumeration: maximize total IoU, ties
// resolved toward the lexicographically smallest map (mirrors the solver's
// pinned tie rule). Returns -1 for unmatched ground-truth groups.
inline std::vector<int> brute_force_iou_matching(const gad::EvalRecord& rec) {
  const std::size_t n = rec.gt_groups.size(), m = rec.predictions.size();
  std::vector<int> best_map(n, -1), current(n, -1);
  if (m == 0) return best_map;
  double best_total = -std::numeric_limits<double>::infinity();
  std::vector<bool> used(m, false);
  const std::size_t pairs = std::min(n, m);
  std::function<void(std::size_t, std::size_t)> rec_fn = [&](std::size_t g, std::size_t taken) {
    if (taken == pairs) {
      double total = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        if (current[i] >= 0)
          total += set_iou(rec.gt_groups[i],
                           rec.predictions[static_cast<std::size_t>(current[i])].members);
      if (total > best_total) {  // strictly greater keeps the first (lex-smallest) optimum
        best_total = total;
        best_map = current;
      }
      return;
    }
    if (g >= n) return;
    if (n - g < pairs - taken) return;
    for (std::size_t p = 0; p < m; ++p) {
      if (used[p]) continue;
      used[p] = true;
      current[g] = static_cast<int>(p);
      rec_fn(g + 1, taken + 1);
      current[g] = -1;
      used[p] = false;
    }
    if (n - g - 1 >= pairs - taken) rec_fn(g + 1, taken);
  };
  rec_fn(0, 0);
  return best_map;
}

inline double brute_force_social_accuracy(const std::vector<gad::EvalRecord>& records) {
  std::size_t correct = 0, total = 0;
  for (const gad::EvalRecord& rec : records) {
    const std::vector<int> matched = brute_force_iou_matching(rec);
    for (std::size_t g = 0; g < rec.gt_groups.size(); ++g) {
      ++total;
      if (matched[g] < 0) continue;
      const auto& p = rec.predictions[static_cast<std::size_t>(matched[g])];
      if (p.activity == rec.gt_activities[g] && set_iou(rec.gt_groups[g], p.members) >= 0.5)
        ++correct;
    }
  }
  return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
}

inline double brute_force_membership_accuracy(const std::vector<gad::EvalRecord>& records) {
  std::size_t correct = 0, total = 0;
  for (const gad::EvalRecord& rec : records) {
    const std::vector<int> matched = brute_force_iou_matching(rec);
    for (std::size_t i = 0; i < rec.gt_actions.size(); ++i) {
      ++total;
      int gt_group = -1;
      for (std::size_t g = 0; g < rec.gt_groups.size(); ++g)
        if (std::count(rec.gt_groups[g].begin(), rec.gt_groups[g].end(), static_cast<int>(i)))
          gt_group = static_cast<int>(g);
      int pred_group = -1;
      for (std::size_t p = 0; p < rec.predictions.size(); ++p)
        if (std::count(rec.predictions[p].members.begin(), rec.predictions[p].members.end(),
                       static_cast<int>(i)))
          pred_group = static_cast<int>(p);
      if (gt_group < 0) {
        if (pred_group < 0) ++correct;
      } else if (pred_group >= 0 && matched[static_cast<std::size_t>(gt_group)] == pred_group) {
        ++correct;
      }
    }
  }
  return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
}

inline double brute_force_outlier_miou(const std::vector<gad::EvalRecord>& records) {
  double sum = 0.0;
  for (const gad::EvalRecord& rec : records) {
    std::vector<int> pred;
    for (std::size_t i = 0; i < rec.predicted_assignment.size(); ++i)
      if (rec.predicted_assignment[i] < 0) pred.push_back(static_cast<int>(i));
    sum += set_iou(pred, rec.gt_singletons);
  }
  return records.empty() ? 0.0 : sum / static_cast<double>(records.size());
}

}  // namespace oracle
