#pragma once

#include <string>
#include <vector>

#include "gad/data.hpp"

namespace gad {

enum class Split { train, val, all };

Split parse_split(const std::string& s);

// Fully materialized dataset (annotations plus frames); desk-scale clips fit
// comfortably in memory.
struct LoadedClip {
  ClipAnnotation annotation;
  ClipTargets targets;
  std::vector<Image> frames;
};

struct LoadedDataset {
  std::vector<LoadedClip> clips;  // sorted by clip id

  static LoadedDataset load(const std::string& dir, std::size_t max_groups);
  static LoadedDataset from_generated(std::vector<GeneratedClip> generated);
  std::vector<std::size_t> split_indices(Split split) const;
};

}  // namespace gad
