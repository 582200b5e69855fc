#include "gad/metrics.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "gad/errors.hpp"
#include "gad/losses.hpp"

namespace gad {

double group_iou(const std::vector<int>& a, const std::vector<int>& b) {
  const std::set<int> sa(a.begin(), a.end()), sb(b.begin(), b.end());
  if (sa.empty() && sb.empty()) return 1.0;
  std::size_t inter = 0;
  for (int x : sa) inter += sb.count(x);
  const std::size_t uni = sa.size() + sb.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

namespace {

struct RankedPrediction {
  double confidence;
  std::size_t record;
  std::vector<int> members;  // sorted

  bool operator<(const RankedPrediction& o) const {
    if (confidence != o.confidence) return confidence > o.confidence;
    if (record != o.record) return record < o.record;
    return members < o.members;
  }
};

double average_precision(const std::vector<char>& is_tp, std::size_t num_gt) {
  if (num_gt == 0) return -1.0;
  std::vector<double> precision, recall;
  std::size_t tp = 0;
  for (std::size_t i = 0; i < is_tp.size(); ++i) {
    if (is_tp[i]) ++tp;
    precision.push_back(static_cast<double>(tp) / static_cast<double>(i + 1));
    recall.push_back(static_cast<double>(tp) / static_cast<double>(num_gt));
  }
  // all-point interpolation: running max of precision from the right
  for (std::size_t i = precision.size(); i-- > 1;)
    precision[i - 1] = std::max(precision[i - 1], precision[i]);
  double ap = 0.0, prev_recall = 0.0;
  for (std::size_t i = 0; i < precision.size(); ++i) {
    ap += (recall[i] - prev_recall) * precision[i];
    prev_recall = recall[i];
  }
  return ap;
}

// Clip-level matching maximizing total Group IoU (hungarian over -IoU with
// its deterministic tie rule); gt index → prediction index or -1.
std::vector<int> match_gt_to_predictions(const EvalRecord& rec) {
  std::vector<int> matched(rec.gt_groups.size(), -1);
  if (rec.gt_groups.empty() || rec.predictions.empty()) return matched;
  std::vector<std::vector<double>> cost(rec.gt_groups.size(),
                                        std::vector<double>(rec.predictions.size()));
  for (std::size_t g = 0; g < rec.gt_groups.size(); ++g)
    for (std::size_t p = 0; p < rec.predictions.size(); ++p)
      cost[g][p] = -group_iou(rec.gt_groups[g], rec.predictions[p].members);
  return hungarian(cost).row_to_col;
}

}  // namespace

std::vector<double> group_ap_per_class(const std::vector<EvalRecord>& records, double threshold,
                                       std::size_t num_classes) {
  if (!(threshold > 0.0 && threshold <= 1.0))
    throw std::invalid_argument("group_map: threshold must lie in (0,1]");
  // deterministic record order by clip id
  std::vector<std::size_t> order(records.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return records[a].clip_id < records[b].clip_id;
  });

  std::vector<double> ap(num_classes, -1.0);
  for (std::size_t cls = 0; cls < num_classes; ++cls) {
    std::size_t num_gt = 0;
    std::vector<RankedPrediction> ranked;
    for (std::size_t oi = 0; oi < order.size(); ++oi) {
      const EvalRecord& rec = records[order[oi]];
      for (std::size_t g = 0; g < rec.gt_groups.size(); ++g)
        if (rec.gt_activities[g] == static_cast<int>(cls)) ++num_gt;
      for (const GroupPrediction& p : rec.predictions) {
        if (p.activity != static_cast<int>(cls)) continue;
        std::vector<int> members = p.members;
        std::sort(members.begin(), members.end());
        ranked.push_back({p.confidence, oi, std::move(members)});
      }
    }
    if (num_gt == 0) continue;
    std::sort(ranked.begin(), ranked.end());

    std::vector<std::set<std::size_t>> taken(order.size());
    std::vector<char> is_tp(ranked.size(), 0);
    for (std::size_t r = 0; r < ranked.size(); ++r) {
      const EvalRecord& rec = records[order[ranked[r].record]];
      double best_iou = 0.0;
      int best_gt = -1;
      for (std::size_t g = 0; g < rec.gt_groups.size(); ++g) {
        if (rec.gt_activities[g] != static_cast<int>(cls)) continue;
        if (taken[ranked[r].record].count(g)) continue;
        const double iou = group_iou(ranked[r].members, rec.gt_groups[g]);
        if (iou >= threshold && iou > best_iou) {
          best_iou = iou;
          best_gt = static_cast<int>(g);
        }
      }
      if (best_gt >= 0) {
        is_tp[r] = 1;
        taken[ranked[r].record].insert(static_cast<std::size_t>(best_gt));
      }
    }
    ap[cls] = average_precision(is_tp, num_gt);
  }
  return ap;
}

double group_map(const std::vector<EvalRecord>& records, double threshold,
                 std::size_t num_classes) {
  const std::vector<double> ap = group_ap_per_class(records, threshold, num_classes);
  double sum = 0.0;
  std::size_t counted = 0;
  for (double a : ap) {
    if (a >= 0.0) {
      sum += a;
      ++counted;
    }
  }
  return counted == 0 ? 0.0 : sum / static_cast<double>(counted);
}

double outlier_miou(const std::vector<EvalRecord>& records) {
  if (records.empty()) return 0.0;
  double sum = 0.0;
  for (const EvalRecord& rec : records) {
    std::vector<int> predicted_outliers;
    for (std::size_t i = 0; i < rec.predicted_assignment.size(); ++i)
      if (rec.predicted_assignment[i] == kOutlier) predicted_outliers.push_back(static_cast<int>(i));
    sum += group_iou(predicted_outliers, rec.gt_singletons);
  }
  return sum / static_cast<double>(records.size());
}

double individual_accuracy(const std::vector<EvalRecord>& records) {
  std::size_t correct = 0, total = 0;
  for (const EvalRecord& rec : records) {
    for (std::size_t i = 0; i < rec.gt_actions.size(); ++i) {
      ++total;
      if (i < rec.predicted_actions.size() && rec.predicted_actions[i] == rec.gt_actions[i])
        ++correct;
    }
  }
  return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
}

double social_accuracy(const std::vector<EvalRecord>& records) {
  std::size_t correct = 0, total = 0;
  for (const EvalRecord& rec : records) {
    const std::vector<int> matched = match_gt_to_predictions(rec);
    for (std::size_t g = 0; g < rec.gt_groups.size(); ++g) {
      ++total;
      if (matched[g] < 0) continue;
      const GroupPrediction& p = rec.predictions[static_cast<std::size_t>(matched[g])];
      if (p.activity == rec.gt_activities[g] &&
          group_iou(rec.gt_groups[g], p.members) >= 0.5)
        ++correct;
    }
  }
  return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
}

double membership_accuracy(const std::vector<EvalRecord>& records) {
  std::size_t correct = 0, total = 0;
  for (const EvalRecord& rec : records) {
    const std::vector<int> matched = match_gt_to_predictions(rec);
    const std::size_t actors = rec.gt_actions.size();
    // prediction index containing each actor, -1 when none (predicted outlier)
    std::vector<int> pred_of(actors, -1);
    for (std::size_t p = 0; p < rec.predictions.size(); ++p)
      for (int i : rec.predictions[p].members) pred_of[static_cast<std::size_t>(i)] = static_cast<int>(p);
    std::vector<int> gt_group_of(actors, -1);
    for (std::size_t g = 0; g < rec.gt_groups.size(); ++g)
      for (int i : rec.gt_groups[g]) gt_group_of[static_cast<std::size_t>(i)] = static_cast<int>(g);
    for (std::size_t i = 0; i < actors; ++i) {
      ++total;
      if (gt_group_of[i] < 0) {
        if (pred_of[i] < 0) ++correct;  // singleton predicted as outlier
      } else if (pred_of[i] >= 0 && matched[static_cast<std::size_t>(gt_group_of[i])] == pred_of[i]) {
        ++correct;
      }
    }
  }
  return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
}

}  // namespace gad
