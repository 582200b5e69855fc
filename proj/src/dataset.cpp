#include "gad/dataset.hpp"

#include <algorithm>

#include "gad/errors.hpp"

namespace gad {

Split parse_split(const std::string& s) {
  if (s == "train") return Split::train;
  if (s == "val") return Split::val;
  if (s == "all") return Split::all;
  throw ConfigError("unknown split '" + s + "' (expected train|val|all)");
}

LoadedDataset LoadedDataset::load(const std::string& dir, std::size_t max_groups) {
  LoadedDataset ds;
  for (ClipAnnotation& ann : load_annotations(annotations_path(dir), max_groups)) {
    LoadedClip clip;
    clip.targets = ann.targets();
    clip.frames.reserve(static_cast<std::size_t>(ann.frame_count));
    for (int f = 0; f < ann.frame_count; ++f)
      clip.frames.push_back(load_frame(dir, ann.clip_id, f));
    clip.annotation = std::move(ann);
    ds.clips.push_back(std::move(clip));
  }
  std::sort(ds.clips.begin(), ds.clips.end(), [](const LoadedClip& a, const LoadedClip& b) {
    return a.annotation.clip_id < b.annotation.clip_id;
  });
  return ds;
}

LoadedDataset LoadedDataset::from_generated(std::vector<GeneratedClip> generated) {
  LoadedDataset ds;
  for (GeneratedClip& g : generated) {
    LoadedClip clip;
    clip.targets = g.annotation.targets();
    clip.annotation = std::move(g.annotation);
    clip.frames = std::move(g.frames);
    ds.clips.push_back(std::move(clip));
  }
  std::sort(ds.clips.begin(), ds.clips.end(), [](const LoadedClip& a, const LoadedClip& b) {
    return a.annotation.clip_id < b.annotation.clip_id;
  });
  return ds;
}

std::vector<std::size_t> LoadedDataset::split_indices(Split split) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < clips.size(); ++i) {
    const bool val = is_validation_clip(clips[i].annotation.clip_id);
    if (split == Split::all || (split == Split::val) == val) out.push_back(i);
  }
  return out;
}

}  // namespace gad
