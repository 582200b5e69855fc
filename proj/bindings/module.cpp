#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gad/data.hpp"
#include "gad/losses.hpp"
#include "gad/metrics.hpp"
#include "gad/numeric.hpp"

namespace py = pybind11;
using namespace gad;

PYBIND11_MODULE(_core, m) {
  m.doc() = "group activity detection toolkit: core numeric ops, assignment "
            "solver, sampling and evaluation metrics";

  m.def("softmax", &softmax, py::arg("values"));
  m.def("layer_norm", &layer_norm, py::arg("values"), py::arg("gamma"), py::arg("beta"),
        py::arg("epsilon") = 1e-5);
  m.def("cross_entropy", &cross_entropy, py::arg("logits"), py::arg("target"));

  m.def(
      "hungarian",
      [](const std::vector<std::vector<double>>& cost) {
        const Assignment a = hungarian(cost);
        std::vector<std::pair<int, int>> pairs;
        for (std::size_t i = 0; i < a.row_to_col.size(); ++i)
          if (a.row_to_col[i] >= 0) pairs.emplace_back(static_cast<int>(i), a.row_to_col[i]);
        return py::make_tuple(pairs, a.total_cost);
      },
      py::arg("cost"),
      "Minimum-cost assignment; returns ((row, col) pairs, total cost) with "
      "deterministic lexicographic tie-breaking.");

  m.def(
      "segment_sample",
      [](int frame_count, int t, const std::string& mode, std::uint64_t seed) {
        return segment_sample(frame_count, t,
                              mode == "train" ? SampleMode::train : SampleMode::eval, seed);
      },
      py::arg("frame_count"), py::arg("t"), py::arg("mode") = "eval", py::arg("seed") = 0);

  m.def("group_iou", &group_iou, py::arg("members_a"), py::arg("members_b"));

  py::class_<GroupPrediction>(m, "GroupPrediction")
      .def(py::init([](std::vector<int> members, int activity, double confidence) {
             GroupPrediction p;
             p.members = std::move(members);
             p.activity = activity;
             p.confidence = confidence;
             return p;
           }),
           py::arg("members"), py::arg("activity"), py::arg("confidence"))
      .def_readwrite("members", &GroupPrediction::members)
      .def_readwrite("activity", &GroupPrediction::activity)
      .def_readwrite("confidence", &GroupPrediction::confidence);

  py::class_<EvalRecord>(m, "EvalRecord")
      .def(py::init<>())
      .def_readwrite("clip_id", &EvalRecord::clip_id)
      .def_readwrite("predictions", &EvalRecord::predictions)
      .def_readwrite("predicted_actions", &EvalRecord::predicted_actions)
      .def_readwrite("predicted_assignment", &EvalRecord::predicted_assignment)
      .def_readwrite("gt_groups", &EvalRecord::gt_groups)
      .def_readwrite("gt_activities", &EvalRecord::gt_activities)
      .def_readwrite("gt_actions", &EvalRecord::gt_actions)
      .def_readwrite("gt_singletons", &EvalRecord::gt_singletons);

  m.def("group_map", &group_map, py::arg("records"), py::arg("threshold"),
        py::arg("num_classes"));
  m.def("outlier_miou", &outlier_miou, py::arg("records"));
  m.def("individual_accuracy", &individual_accuracy, py::arg("records"));
  m.def("social_accuracy", &social_accuracy, py::arg("records"));
  m.def("membership_accuracy", &membership_accuracy, py::arg("records"));

  m.def(
      "generate_dataset",
      [](const std::string& out_dir, int clips, std::uint64_t seed) {
        SyntheticConfig cfg;
        cfg.clips = clips;
        cfg.seed = seed;
        const auto generated = generate_synthetic(cfg);
        save_dataset(out_dir, generated);
        std::vector<std::string> ids;
        for (const auto& c : generated) ids.push_back(c.annotation.clip_id);
        return ids;
      },
      py::arg("out_dir"), py::arg("clips") = 64, py::arg("seed") = 0,
      "Write a synthetic multi-group dataset and return the clip ids.");

  m.attr("__version__") = "0.1.0";
}
