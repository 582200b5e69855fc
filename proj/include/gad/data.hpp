#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gad/image.hpp"
#include "gad/losses.hpp"
#include "gad/rng.hpp"

namespace gad {

constexpr int kAnnotationSchemaVersion = 1;

struct TrackAnnotation {
  int id = 0;
  int action = 0;
  std::vector<Box> boxes;  // one per frame
};

struct GroupAnnotation {
  int activity = 0;
  std::vector<int> members;  // track ids
};

struct ClipAnnotation {
  std::string clip_id;
  int frame_count = 0;
  int width = 0, height = 0;
  std::vector<TrackAnnotation> tracks;
  std::vector<GroupAnnotation> groups;
  std::vector<int> singletons;  // track ids

  std::size_t actor_count() const { return tracks.size(); }
  // Throws DataError naming the clip and offending field on violation.
  void validate(std::size_t max_groups) const;
  ClipTargets targets() const;
};

struct SyntheticConfig {
  int clips = 64;
  int min_actors = 3, max_actors = 14;
  int min_groups = 1, max_groups = 3;
  int min_group_size = 2, max_group_size = 4;
  int max_singletons = 3;
  int activities = 6;
  int actions = 6;
  int frame_count = 20;
  int width = 32, height = 32;
  std::uint64_t seed = 0;

  void validate() const;
};

enum class SampleMode { train, eval };

// Segment-based sampling: the clip is split into T contiguous segments (the
// remainder spread over leading segments); eval takes each segment's middle
// index, train draws uniformly within each segment from the seeded generator.
std::vector<int> segment_sample(int frame_count, int t, SampleMode mode, std::uint64_t seed);

struct GeneratedClip {
  ClipAnnotation annotation;
  std::vector<Image> frames;
};

// Deterministic multi-group scene generator: group members are colored blobs
// clustered around a group center over a dim table patch, activity encoded in
// the blob body color, individual action in the blob core; singletons sit
// away from every cluster with no table underneath.
std::vector<GeneratedClip> generate_synthetic(const SyntheticConfig& cfg);

void save_dataset(const std::string& dir, const std::vector<GeneratedClip>& clips);
std::vector<ClipAnnotation> load_annotations(const std::string& path, std::size_t max_groups = 7);
Image load_frame(const std::string& dataset_dir, const std::string& clip_id, int frame_index);

// Deterministic, seed-independent 80/20 split by clip-id hash.
bool is_validation_clip(const std::string& clip_id);

std::string annotations_path(const std::string& dataset_dir);

}  // namespace gad
