// Random toy evaluation sets shared by the metric tests and the acceptance
// suite: disjoint ground-truth groups plus disjoint predictions derived from
// a perturbed assignment, mirroring what the pipeline emits.
#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "gad/metrics.hpp"
#include "gad/rng.hpp"

namespace toy {

inline std::vector<gad::EvalRecord> make_records(gad::Rng& rng, std::size_t clips,
                                                 std::size_t num_classes) {
  std::vector<gad::EvalRecord> records;
  for (std::size_t c = 0; c < clips; ++c) {
    gad::EvalRecord rec;
    rec.clip_id = "toy_" + std::to_string(100 + c);
    const int actors = static_cast<int>(rng.uniform_int(4, 10));
    const int groups = static_cast<int>(rng.uniform_int(1, 4));

    // partition a prefix of the actors into disjoint ground-truth groups
    std::vector<int> ids(static_cast<std::size_t>(actors));
    for (int i = 0; i < actors; ++i) ids[static_cast<std::size_t>(i)] = i;
    rng.shuffle(ids);
    std::size_t cursor = 0;
    for (int g = 0; g < groups && cursor + 2 <= ids.size(); ++g) {
      const std::size_t size =
          std::min<std::size_t>(static_cast<std::size_t>(rng.uniform_int(2, 3)),
                                ids.size() - cursor);
      if (size < 2) break;
      std::vector<int> members(ids.begin() + static_cast<long>(cursor),
                               ids.begin() + static_cast<long>(cursor + size));
      std::sort(members.begin(), members.end());
      rec.gt_groups.push_back(std::move(members));
      rec.gt_activities.push_back(static_cast<int>(rng.uniform_int(0, static_cast<int>(num_classes) - 1)));
      cursor += size;
    }
    for (std::size_t i = cursor; i < ids.size(); ++i) rec.gt_singletons.push_back(ids[i]);
    std::sort(rec.gt_singletons.begin(), rec.gt_singletons.end());
    for (int i = 0; i < actors; ++i) {
      rec.gt_actions.push_back(static_cast<int>(rng.uniform_int(0, static_cast<int>(num_classes) - 1)));
      rec.predicted_actions.push_back(static_cast<int>(rng.uniform_int(0, static_cast<int>(num_classes) - 1)));
    }

    // predicted assignment: ground truth with noise (flips to other groups
    // or to outlier), keeping predictions disjoint by construction
    std::vector<int> assignment(static_cast<std::size_t>(actors), gad::kOutlier);
    for (std::size_t g = 0; g < rec.gt_groups.size(); ++g)
      for (int i : rec.gt_groups[g]) assignment[static_cast<std::size_t>(i)] = static_cast<int>(g);
    for (int i = 0; i < actors; ++i) {
      if (rng.uniform01() < 0.25) {
        const int target = static_cast<int>(rng.uniform_int(-1, groups - 1));
        assignment[static_cast<std::size_t>(i)] = target;
      }
    }
    for (int g = 0; g < groups; ++g) {
      gad::GroupPrediction p;
      for (int i = 0; i < actors; ++i)
        if (assignment[static_cast<std::size_t>(i)] == g) p.members.push_back(i);
      if (p.members.empty()) continue;
      const bool right_class = rng.uniform01() < 0.7 && static_cast<std::size_t>(g) < rec.gt_activities.size();
      p.activity = right_class
                       ? rec.gt_activities[static_cast<std::size_t>(g)]
                       : static_cast<int>(rng.uniform_int(0, static_cast<int>(num_classes) - 1));
      p.confidence = rng.uniform(0.05, 1.0);
      rec.predictions.push_back(std::move(p));
    }
    rec.predicted_assignment = assignment;
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace toy
