#include "gad/evaluate.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "gad/errors.hpp"
#include "gad/tensor_io.hpp"
#include "gad/trainer.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace gad {

namespace {

std::string frame_feature_name(int frame_index) {
  std::ostringstream os;
  os << "f" << std::setw(4) << std::setfill('0') << frame_index << ".ten";
  return os.str();
}

std::vector<PatchGrid> load_feature_grids(const std::string& features_dir,
                                          const ClipAnnotation& ann, const std::vector<int>& idx,
                                          const BackboneConfig& backbone) {
  std::vector<PatchGrid> grids;
  for (int f : idx) {
    const fs::path path = fs::path(features_dir) / ann.clip_id / frame_feature_name(f);
    Tensor t = read_tensor(path.string());
    if (t.rank() != 3)
      throw DataError("feature file " + path.string() + ": expected rank-3 grid tensor");
    const std::size_t rows = t.extent(0), cols = t.extent(1), dim = t.extent(2);
    if (rows != backbone.grid_extent() || cols != backbone.grid_extent() ||
        dim != backbone.model_dim)
      throw DataError("feature file " + path.string() + ": grid shape " + t.shape_str() +
                      " does not match the configured backbone");
    Tensor flat({rows * cols, dim});
    for (std::size_t i = 0; i < flat.size(); ++i) flat.at(i) = t.at(i);
    grids.push_back(PatchGrid{Var::constant(std::move(flat)), rows, cols});
  }
  return grids;
}

GroupActivityModel::Forward eval_forward(GroupActivityModel& model, const LoadedClip& clip,
                                         const std::optional<std::string>& features_dir,
                                         bool record_attention = false) {
  const std::size_t frames = model.config().frames;
  const std::vector<int> idx =
      segment_sample(clip.annotation.frame_count, static_cast<int>(frames), SampleMode::eval, 0);
  if (features_dir) {
    std::vector<std::vector<Box>> boxes;
    for (int f : idx) {
      std::vector<Box> frame_boxes;
      for (const TrackAnnotation& tr : clip.annotation.tracks)
        frame_boxes.push_back(tr.boxes[static_cast<std::size_t>(f)]);
      boxes.push_back(std::move(frame_boxes));
    }
    const auto grids =
        load_feature_grids(*features_dir, clip.annotation, idx, model.config().backbone);
    return model.forward_with_grids(grids, boxes, record_attention);
  }
  const auto input = sample_clip_input(clip, frames, SampleMode::eval, 0);
  return model.forward(input, record_attention);
}

}  // namespace

std::vector<EvalRecord> predict_records(GroupActivityModel& model, const LoadedDataset& data,
                                        Split split,
                                        const std::optional<std::string>& features_dir) {
  std::vector<EvalRecord> records;
  for (std::size_t i : data.split_indices(split)) {
    const LoadedClip& clip = data.clips[i];
    const auto fwd = eval_forward(model, clip, features_dir);
    const ClipPrediction pred = predict_from_forward(fwd, model.config().heads());
    EvalRecord rec;
    rec.clip_id = clip.annotation.clip_id;
    rec.predictions = pred.groups;
    rec.predicted_actions = pred.actions;
    rec.predicted_assignment = pred.assignment;
    rec.gt_groups = clip.targets.groups;
    rec.gt_activities = clip.targets.activities;
    rec.gt_actions = clip.targets.actions;
    rec.gt_singletons = clip.targets.singletons;
    records.push_back(std::move(rec));
  }
  return records;
}

MetricsReport compute_metrics(GroupActivityModel& model, const std::vector<EvalRecord>& records,
                              const std::vector<double>& thresholds, std::size_t num_classes) {
  MetricsReport report;
  report.thresholds = thresholds;
  for (double t : thresholds) {
    report.map_at[t] = group_map(records, t, num_classes);
    report.ap_per_class[t] = group_ap_per_class(records, t, num_classes);
  }
  report.outlier_miou = outlier_miou(records);
  report.individual_accuracy = individual_accuracy(records);
  report.social_accuracy = social_accuracy(records);
  report.membership_accuracy = membership_accuracy(records);
  report.trainable_params = model.trainable_size();
  report.total_params = model.total_size();
  return report;
}

void write_metrics_report(const MetricsReport& report, std::ostream& os) {
  os << std::fixed << std::setprecision(4);
  for (double t : report.thresholds) {
    std::ostringstream label;
    label << std::fixed << std::setprecision(2) << t;
    os << "group_map@" << label.str() << " " << report.map_at.at(t) << "\n";
  }
  os << "outlier_miou " << report.outlier_miou << "\n";
  os << "individual_accuracy " << report.individual_accuracy << "\n";
  os << "social_accuracy " << report.social_accuracy << "\n";
  os << "membership_accuracy " << report.membership_accuracy << "\n";
  os << "trainable_params " << report.trainable_params << "\n";
  os << "total_params " << report.total_params << "\n";
  for (double t : report.thresholds) {
    std::ostringstream label;
    label << std::fixed << std::setprecision(2) << t;
    const auto& ap = report.ap_per_class.at(t);
    for (std::size_t c = 0; c < ap.size(); ++c) {
      os << "ap@" << label.str() << "_class_" << c << " ";
      if (ap[c] < 0.0)
        os << "n/a\n";
      else
        os << ap[c] << "\n";
    }
  }
}

void write_predictions_jsonl(const std::vector<EvalRecord>& records, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw DataError("write_predictions_jsonl: cannot open " + path);
  for (const EvalRecord& rec : records) {
    json j;
    j["schema_version"] = kAnnotationSchemaVersion;
    j["clip_id"] = rec.clip_id;
    j["assignments"] = rec.predicted_assignment;
    j["actions"] = rec.predicted_actions;
    j["groups"] = json::array();
    for (const GroupPrediction& p : rec.predictions)
      j["groups"].push_back(
          {{"members", p.members}, {"activity", p.activity}, {"confidence", p.confidence}});
    f << j.dump() << "\n";
  }
}

void dump_clip_features(GroupActivityModel& model, const LoadedClip& clip,
                        const std::string& out_dir) {
  const std::size_t frames = model.config().frames;
  const std::vector<int> idx =
      segment_sample(clip.annotation.frame_count, static_cast<int>(frames), SampleMode::eval, 0);
  const fs::path clip_dir = fs::path(out_dir) / clip.annotation.clip_id;
  fs::create_directories(clip_dir);
  for (int f : idx) {
    const PatchGrid grid =
        model.backbone().forward(clip.frames[static_cast<std::size_t>(f)], model.prompts());
    const Tensor& flat = grid.tokens.value();
    Tensor shaped({grid.rows, grid.cols, flat.cols()});
    for (std::size_t i = 0; i < flat.size(); ++i) shaped.at(i) = flat.at(i);
    write_tensor((clip_dir / frame_feature_name(f)).string(), shaped);
  }
}

void dump_attention(GroupActivityModel& model, const LoadedClip& clip,
                    const std::string& out_dir) {
  const auto fwd = eval_forward(model, clip, {}, /*record_attention=*/true);
  const AttentionRecords& records = fwd.gct.records;
  const fs::path attn_dir = fs::path(out_dir) / "attn";
  const fs::path heat_dir = fs::path(out_dir) / "heatmaps";
  fs::create_directories(attn_dir);
  fs::create_directories(heat_dir);

  auto write_matrix = [](const fs::path& path, const Tensor& m) {
    std::ofstream f(path);
    if (!f) throw DataError("dump_attention: cannot open " + path.string());
    f << std::setprecision(17);
    for (std::size_t r = 0; r < m.rows(); ++r) {
      for (std::size_t c = 0; c < m.cols(); ++c) f << (c ? " " : "") << m.at2(r, c);
      f << "\n";
    }
  };

  const char* layer_names[2] = {"grouping", "contextual"};
  for (std::size_t t = 0; t < records.grouping.size(); ++t) {
    for (std::size_t layer = 0; layer < 2; ++layer) {
      const auto& heads = layer == 0 ? records.grouping[t] : records.contextual[t];
      for (std::size_t h = 0; h < heads.size(); ++h) {
        std::ostringstream name;
        name << layer_names[layer] << "_f" << t << "_h" << h << ".txt";
        write_matrix(attn_dir / name.str(), heads[h]);
      }
    }
  }

  // per-group-token heat maps from the head-averaged contextual rows
  const std::size_t k = model.config().group_tokens;
  const std::size_t rows = model.config().backbone.grid_extent();
  const std::size_t cols = rows;
  for (std::size_t t = 0; t < records.contextual.size(); ++t) {
    const auto& heads = records.contextual[t];
    const std::size_t actors = heads[0].rows() - k;
    for (std::size_t g = 0; g < k; ++g) {
      std::vector<std::vector<double>> map(rows, std::vector<double>(cols, 0.0));
      for (const Tensor& head : heads) {
        for (std::size_t c = 0; c < head.cols(); ++c)
          map[c / cols][c % cols] += head.at2(actors + g, c) / static_cast<double>(heads.size());
      }
      std::ostringstream name;
      name << "group" << g << "_f" << t << ".pgm";
      write_pgm_ascii((heat_dir / name.str()).string(), map);
    }
  }
}

}  // namespace gad
