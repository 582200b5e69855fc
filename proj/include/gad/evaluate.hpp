#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gad/dataset.hpp"
#include "gad/metrics.hpp"
#include "gad/model.hpp"

namespace gad {

struct MetricsReport {
  std::vector<double> thresholds;
  std::map<double, double> map_at;                     // threshold → Group mAP
  std::map<double, std::vector<double>> ap_per_class;  // threshold → per-class AP (-1 = no GT)
  double outlier_miou = 0.0;
  double individual_accuracy = 0.0;
  double social_accuracy = 0.0;
  double membership_accuracy = 0.0;
  std::size_t trainable_params = 0;
  std::size_t total_params = 0;
};

// Deterministic eval-mode frame sampling; clips are processed in clip-id
// order. When `features_dir` is set, per-frame patch grids are read from
// <features_dir>/<clip_id>/f####.ten instead of running the backbone.
std::vector<EvalRecord> predict_records(GroupActivityModel& model, const LoadedDataset& data,
                                        Split split,
                                        const std::optional<std::string>& features_dir = {});

MetricsReport compute_metrics(GroupActivityModel& model, const std::vector<EvalRecord>& records,
                              const std::vector<double>& thresholds, std::size_t num_classes);

void write_metrics_report(const MetricsReport& report, std::ostream& os);
void write_predictions_jsonl(const std::vector<EvalRecord>& records, const std::string& path);

// Dumps per-frame patch grids for one clip (eval-mode sampling) in the
// tensor file format, for the external-features route.
void dump_clip_features(GroupActivityModel& model, const LoadedClip& clip,
                        const std::string& out_dir);

// Attention dump: one text matrix per (layer, head, frame) with rows summing
// to one, plus per-group-token heat maps over the patch grid as graymaps.
void dump_attention(GroupActivityModel& model, const LoadedClip& clip, const std::string& out_dir);

}  // namespace gad
