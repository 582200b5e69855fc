#pragma once

#include <string>
#include <vector>

#include "gad/heads.hpp"

namespace gad {

// Everything needed to score one clip; prediction and ground-truth actor
// index spaces coincide (boxes are shared inputs).
struct EvalRecord {
  std::string clip_id;
  std::vector<GroupPrediction> predictions;
  std::vector<int> predicted_actions;     // per actor
  std::vector<int> predicted_assignment;  // per actor: token index or kOutlier
  std::vector<std::vector<int>> gt_groups;
  std::vector<int> gt_activities;         // per ground-truth group
  std::vector<int> gt_actions;            // per actor
  std::vector<int> gt_singletons;
};

// Set Jaccard over member indices; both empty → 1.
double group_iou(const std::vector<int>& a, const std::vector<int>& b);

// Detection-style mAP over group predictions: per class, rank dataset-wide by
// confidence (ties: clip id, then member set), greedily match to unmatched
// same-clip ground truth at IoU ≥ threshold, AP by all-point interpolation,
// mean over classes with at least one ground-truth instance.
double group_map(const std::vector<EvalRecord>& records, double threshold,
                 std::size_t num_classes);
// Per-class AP at a threshold; classes with no ground truth get -1.
std::vector<double> group_ap_per_class(const std::vector<EvalRecord>& records, double threshold,
                                       std::size_t num_classes);

// Mean over clips of IoU(predicted outliers, ground-truth singletons).
double outlier_miou(const std::vector<EvalRecord>& records);

// Fraction of actors with the correct predicted action class.
double individual_accuracy(const std::vector<EvalRecord>& records);

// Ground-truth groups are matched to predictions per clip, maximizing total
// Group IoU; a group counts when its match has IoU ≥ 0.5 and the right class.
double social_accuracy(const std::vector<EvalRecord>& records);

// Fraction of actors (singletons included) whose predicted group maps to
// their ground-truth group under the same matching.
double membership_accuracy(const std::vector<EvalRecord>& records);

}  // namespace gad
