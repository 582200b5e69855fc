#include "gad/data.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "gad/errors.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace gad {

void ClipAnnotation::validate(std::size_t max_groups) const {
  const std::string where = "clip '" + clip_id + "': ";
  if (clip_id.empty()) throw DataError("clip with empty clip_id");
  if (frame_count <= 0) throw DataError(where + "frame_count must be positive");
  if (width <= 0 || height <= 0) throw DataError(where + "width/height must be positive");
  if (tracks.empty()) throw DataError(where + "tracks: clip has no actors");
  if (groups.empty()) throw DataError(where + "groups: clip has no groups");
  if (groups.size() > max_groups)
    throw DataError(where + "groups: " + std::to_string(groups.size()) + " groups exceed limit " +
                    std::to_string(max_groups));
  std::set<int> track_ids;
  for (const auto& tr : tracks) {
    if (!track_ids.insert(tr.id).second)
      throw DataError(where + "tracks: duplicate track id " + std::to_string(tr.id));
    if (tr.boxes.size() != static_cast<std::size_t>(frame_count))
      throw DataError(where + "tracks[" + std::to_string(tr.id) + "].boxes: expected " +
                      std::to_string(frame_count) + " boxes, got " + std::to_string(tr.boxes.size()));
    for (std::size_t f = 0; f < tr.boxes.size(); ++f) {
      if (!tr.boxes[f].valid())
        throw DataError(where + "tracks[" + std::to_string(tr.id) + "].boxes[" +
                        std::to_string(f) + "]: invalid box");
    }
    if (tr.action < 0) throw DataError(where + "tracks[" + std::to_string(tr.id) + "].action: negative");
  }
  std::set<int> seen;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (groups[g].members.empty())
      throw DataError(where + "groups[" + std::to_string(g) + "].members: empty group");
    if (groups[g].activity < 0)
      throw DataError(where + "groups[" + std::to_string(g) + "].activity: negative");
    for (int id : groups[g].members) {
      if (!track_ids.count(id))
        throw DataError(where + "groups[" + std::to_string(g) + "].members: unknown track id " +
                        std::to_string(id));
      if (!seen.insert(id).second)
        throw DataError(where + "track " + std::to_string(id) +
                        " appears in more than one group or in a group and the singleton list");
    }
  }
  for (int id : singletons) {
    if (!track_ids.count(id))
      throw DataError(where + "singletons: unknown track id " + std::to_string(id));
    if (!seen.insert(id).second)
      throw DataError(where + "track " + std::to_string(id) +
                      " appears in more than one group or in a group and the singleton list");
  }
  if (seen.size() != tracks.size())
    throw DataError(where + "some tracks are neither grouped nor flagged singleton");
}

ClipTargets ClipAnnotation::targets() const {
  // track ids are dense [0, M) by construction; keep an index map anyway
  std::vector<int> index_of;
  index_of.assign(tracks.size(), -1);
  std::vector<int> sorted_ids;
  for (const auto& tr : tracks) sorted_ids.push_back(tr.id);
  std::sort(sorted_ids.begin(), sorted_ids.end());
  auto index = [&](int id) {
    const auto it = std::lower_bound(sorted_ids.begin(), sorted_ids.end(), id);
    return static_cast<int>(it - sorted_ids.begin());
  };
  ClipTargets t;
  t.actions.assign(tracks.size(), 0);
  for (const auto& tr : tracks) t.actions[static_cast<std::size_t>(index(tr.id))] = tr.action;
  for (const auto& g : groups) {
    std::vector<int> members;
    for (int id : g.members) members.push_back(index(id));
    std::sort(members.begin(), members.end());
    t.groups.push_back(std::move(members));
    t.activities.push_back(g.activity);
  }
  for (int id : singletons) t.singletons.push_back(index(id));
  std::sort(t.singletons.begin(), t.singletons.end());
  return t;
}

void SyntheticConfig::validate() const {
  if (clips <= 0) throw ConfigError("SyntheticConfig: clips must be positive");
  if (min_actors < 1 || max_actors < min_actors)
    throw ConfigError("SyntheticConfig: invalid actors range");
  if (min_groups < 1 || max_groups < min_groups || max_groups > 7)
    throw ConfigError("SyntheticConfig: invalid groups range (1..7)");
  if (min_group_size < 1 || max_group_size < min_group_size)
    throw ConfigError("SyntheticConfig: invalid group-size range");
  if (max_singletons < 0) throw ConfigError("SyntheticConfig: max_singletons must be >= 0");
  if (activities < 1 || actions < 1)
    throw ConfigError("SyntheticConfig: class counts must be positive");
  if (frame_count < 1) throw ConfigError("SyntheticConfig: frame_count must be positive");
  if (width < 16 || height < 16) throw ConfigError("SyntheticConfig: image too small");
}

std::vector<int> segment_sample(int frame_count, int t, SampleMode mode, std::uint64_t seed) {
  if (t < 1) throw std::invalid_argument("segment_sample: T must be >= 1");
  if (frame_count < t)
    throw std::invalid_argument("segment_sample: frame_count " + std::to_string(frame_count) +
                                " < T " + std::to_string(t));
  const int base = frame_count / t;
  const int remainder = frame_count % t;
  Rng rng(seed);
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(t));
  int start = 0;
  for (int s = 0; s < t; ++s) {
    const int len = base + (s < remainder ? 1 : 0);
    if (mode == SampleMode::eval) {
      out.push_back(start + len / 2);
    } else {
      out.push_back(start + static_cast<int>(rng.uniform_int(0, len - 1)));
    }
    start += len;
  }
  return out;
}

namespace {

struct Rgb {
  std::uint8_t r, g, b;
};

// distinct activity body colors (index = activity class)
const Rgb kActivityColors[] = {
    {220, 40, 40}, {40, 200, 60}, {50, 90, 230}, {230, 220, 50}, {200, 60, 200}, {60, 210, 210},
    {240, 130, 40},
};
// distinct action core colors (index = action class)
const Rgb kActionColors[] = {
    {255, 255, 255}, {15, 15, 15}, {250, 160, 30}, {140, 70, 230}, {250, 120, 170}, {30, 140, 110},
    {180, 220, 120},
};
const Rgb kSingletonBody = {150, 150, 150};
const Rgb kTableColor = {95, 72, 48};

constexpr double kBlobRadius = 1.7;
constexpr double kCoreRadius = 0.8;
constexpr double kBoxHalf = 2.6;

struct ActorState {
  double x, y;
  int action;
  int group;  // -1 for singleton
};

void draw_disk(Image& img, double cx, double cy, double radius, Rgb color) {
  const int x0 = std::max(0, static_cast<int>(std::floor(cx - radius)));
  const int x1 = std::min(static_cast<int>(img.width) - 1, static_cast<int>(std::ceil(cx + radius)));
  const int y0 = std::max(0, static_cast<int>(std::floor(cy - radius)));
  const int y1 = std::min(static_cast<int>(img.height) - 1, static_cast<int>(std::ceil(cy + radius)));
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      const double dx = x + 0.5 - cx, dy = y + 0.5 - cy;
      if (dx * dx + dy * dy <= radius * radius) {
        img.at(static_cast<std::size_t>(x), static_cast<std::size_t>(y), 0) = color.r;
        img.at(static_cast<std::size_t>(x), static_cast<std::size_t>(y), 1) = color.g;
        img.at(static_cast<std::size_t>(x), static_cast<std::size_t>(y), 2) = color.b;
      }
    }
  }
}

GeneratedClip generate_clip(const SyntheticConfig& cfg, int clip_index) {
  Rng rng(mix_seed(cfg.seed, 0x5ce9e5u, static_cast<std::uint64_t>(clip_index)));
  const double w = cfg.width, h = cfg.height;
  const double margin = 4.5;

  // sample a feasible (group sizes, singleton count) combination
  int n_groups = 0, n_singles = 0;
  std::vector<int> sizes;
  for (int attempt = 0;; ++attempt) {
    if (attempt >= 200)
      throw DataError("generate_synthetic: no feasible actor layout for clip " +
                      std::to_string(clip_index));
    n_groups = static_cast<int>(rng.uniform_int(cfg.min_groups, cfg.max_groups));
    sizes.clear();
    int total = 0;
    for (int g = 0; g < n_groups; ++g) {
      const int s = static_cast<int>(rng.uniform_int(cfg.min_group_size, cfg.max_group_size));
      sizes.push_back(s);
      total += s;
    }
    n_singles = static_cast<int>(rng.uniform_int(0, cfg.max_singletons));
    total += n_singles;
    if (total >= cfg.min_actors && total <= cfg.max_actors) break;
  }

  // place cluster centers well apart, singletons away from every cluster
  const double cluster_gap = 10.5;
  const double singleton_gap = 7.0;
  std::vector<std::pair<double, double>> centers;
  for (int g = 0; g < n_groups; ++g) {
    bool placed = false;
    for (int attempt = 0; attempt < 400 && !placed; ++attempt) {
      const double cx = rng.uniform(margin, w - margin);
      const double cy = rng.uniform(margin, h - margin);
      placed = true;
      for (const auto& [ox, oy] : centers) {
        const double d2 = (cx - ox) * (cx - ox) + (cy - oy) * (cy - oy);
        if (d2 < cluster_gap * cluster_gap) {
          placed = false;
          break;
        }
      }
      if (placed) centers.emplace_back(cx, cy);
    }
    if (!placed)
      throw DataError("generate_synthetic: could not place group centers for clip " +
                      std::to_string(clip_index));
  }

  std::vector<ActorState> actors;
  auto too_close = [&](double x, double y, double min_dist) {
    for (const auto& a : actors) {
      const double d2 = (x - a.x) * (x - a.x) + (y - a.y) * (y - a.y);
      if (d2 < min_dist * min_dist) return true;
    }
    return false;
  };
  std::vector<int> group_activity;
  for (int g = 0; g < n_groups; ++g) {
    group_activity.push_back(static_cast<int>(rng.uniform_int(0, cfg.activities - 1)));
    for (int mwithin = 0; mwithin < sizes[static_cast<std::size_t>(g)]; ++mwithin) {
      bool placed = false;
      for (int attempt = 0; attempt < 400 && !placed; ++attempt) {
        const double radius = rng.uniform(1.6, 3.6);
        const double angle = rng.uniform(0.0, 6.283185307179586);
        const double x = std::clamp(centers[static_cast<std::size_t>(g)].first + radius * std::cos(angle),
                                    2.5, w - 2.5);
        const double y = std::clamp(centers[static_cast<std::size_t>(g)].second + radius * std::sin(angle),
                                    2.5, h - 2.5);
        if (!too_close(x, y, 2.9)) {
          actors.push_back({x, y, static_cast<int>(rng.uniform_int(0, cfg.actions - 1)), g});
          placed = true;
        }
      }
      if (!placed)
        throw DataError("generate_synthetic: could not place group members for clip " +
                        std::to_string(clip_index));
    }
  }
  for (int s = 0; s < n_singles; ++s) {
    bool placed = false;
    for (int attempt = 0; attempt < 400 && !placed; ++attempt) {
      const double x = rng.uniform(2.5, w - 2.5);
      const double y = rng.uniform(2.5, h - 2.5);
      bool near_cluster = false;
      for (const auto& [ox, oy] : centers) {
        if ((x - ox) * (x - ox) + (y - oy) * (y - oy) < singleton_gap * singleton_gap) {
          near_cluster = true;
          break;
        }
      }
      if (!near_cluster && !too_close(x, y, 2.9)) {
        actors.push_back({x, y, static_cast<int>(rng.uniform_int(0, cfg.actions - 1)), -1});
        placed = true;
      }
    }
    if (!placed)
      throw DataError("generate_synthetic: could not place singletons for clip " +
                      std::to_string(clip_index));
  }

  // per-frame drift: small bounded random walk per track
  std::vector<std::vector<std::pair<double, double>>> positions(
      actors.size(), std::vector<std::pair<double, double>>(static_cast<std::size_t>(cfg.frame_count)));
  for (std::size_t a = 0; a < actors.size(); ++a) {
    double x = actors[a].x, y = actors[a].y;
    for (int f = 0; f < cfg.frame_count; ++f) {
      positions[a][static_cast<std::size_t>(f)] = {x, y};
      x = std::clamp(x + rng.normal(0.0, 0.25), actors[a].x - 1.2, actors[a].x + 1.2);
      y = std::clamp(y + rng.normal(0.0, 0.25), actors[a].y - 1.2, actors[a].y + 1.2);
      x = std::clamp(x, 2.5, w - 2.5);
      y = std::clamp(y, 2.5, h - 2.5);
    }
  }

  GeneratedClip clip;
  std::ostringstream id;
  id << "clip_" << std::setw(4) << std::setfill('0') << clip_index;
  clip.annotation.clip_id = id.str();
  clip.annotation.frame_count = cfg.frame_count;
  clip.annotation.width = cfg.width;
  clip.annotation.height = cfg.height;

  for (std::size_t a = 0; a < actors.size(); ++a) {
    TrackAnnotation tr;
    tr.id = static_cast<int>(a);
    tr.action = actors[a].action;
    for (int f = 0; f < cfg.frame_count; ++f) {
      const auto [x, y] = positions[a][static_cast<std::size_t>(f)];
      Box b;
      b.x0 = std::clamp((x - kBoxHalf) / w, 0.0, 1.0);
      b.y0 = std::clamp((y - kBoxHalf) / h, 0.0, 1.0);
      b.x1 = std::clamp((x + kBoxHalf) / w, 0.0, 1.0);
      b.y1 = std::clamp((y + kBoxHalf) / h, 0.0, 1.0);
      tr.boxes.push_back(b);
    }
    clip.annotation.tracks.push_back(std::move(tr));
  }
  for (int g = 0; g < n_groups; ++g) {
    GroupAnnotation ga;
    ga.activity = group_activity[static_cast<std::size_t>(g)];
    for (std::size_t a = 0; a < actors.size(); ++a)
      if (actors[a].group == g) ga.members.push_back(static_cast<int>(a));
    clip.annotation.groups.push_back(std::move(ga));
  }
  for (std::size_t a = 0; a < actors.size(); ++a)
    if (actors[a].group < 0) clip.annotation.singletons.push_back(static_cast<int>(a));

  // render frames: noisy background, tables under clusters, actor blobs
  for (int f = 0; f < cfg.frame_count; ++f) {
    Image img(static_cast<std::size_t>(cfg.width), static_cast<std::size_t>(cfg.height), 3);
    for (std::size_t y = 0; y < img.height; ++y) {
      for (std::size_t x = 0; x < img.width; ++x) {
        const std::uint64_t noise =
            mix_seed(mix_seed(cfg.seed, static_cast<std::uint64_t>(clip_index)),
                     (static_cast<std::uint64_t>(y) << 20) | x);
        const auto base = static_cast<std::uint8_t>(22 + noise % 18);
        img.at(x, y, 0) = base;
        img.at(x, y, 1) = base;
        img.at(x, y, 2) = static_cast<std::uint8_t>(base + 6);
      }
    }
    for (const auto& [cx, cy] : centers) draw_disk(img, cx, cy, 4.6, kTableColor);
    for (std::size_t a = 0; a < actors.size(); ++a) {
      const auto [x, y] = positions[a][static_cast<std::size_t>(f)];
      const Rgb body = actors[a].group >= 0
                           ? kActivityColors[static_cast<std::size_t>(
                                 group_activity[static_cast<std::size_t>(actors[a].group)])]
                           : kSingletonBody;
      draw_disk(img, x, y, kBlobRadius, body);
      draw_disk(img, x, y, kCoreRadius, kActionColors[static_cast<std::size_t>(actors[a].action)]);
    }
    clip.frames.push_back(std::move(img));
  }
  clip.annotation.validate(7);
  return clip;
}

}  // namespace

std::vector<GeneratedClip> generate_synthetic(const SyntheticConfig& cfg) {
  cfg.validate();
  std::vector<GeneratedClip> clips;
  clips.reserve(static_cast<std::size_t>(cfg.clips));
  for (int i = 0; i < cfg.clips; ++i) clips.push_back(generate_clip(cfg, i));
  return clips;
}

std::string annotations_path(const std::string& dataset_dir) {
  return (fs::path(dataset_dir) / "annotations.jsonl").string();
}

namespace {

json box_to_json(const Box& b) { return json::array({b.x0, b.y0, b.x1, b.y1}); }

Box box_from_json(const json& j) {
  if (!j.is_array() || j.size() != 4) throw DataError("box must be a 4-element array");
  return Box{j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
}

}  // namespace

void save_dataset(const std::string& dir, const std::vector<GeneratedClip>& clips) {
  fs::create_directories(dir);
  std::ofstream ann(annotations_path(dir));
  if (!ann) throw DataError("save_dataset: cannot write " + annotations_path(dir));
  for (const GeneratedClip& clip : clips) {
    const ClipAnnotation& a = clip.annotation;
    json j;
    j["schema_version"] = kAnnotationSchemaVersion;
    j["clip_id"] = a.clip_id;
    j["frame_count"] = a.frame_count;
    j["width"] = a.width;
    j["height"] = a.height;
    j["tracks"] = json::array();
    for (const auto& tr : a.tracks) {
      json jt;
      jt["id"] = tr.id;
      jt["action"] = tr.action;
      jt["boxes"] = json::array();
      for (const Box& b : tr.boxes) jt["boxes"].push_back(box_to_json(b));
      j["tracks"].push_back(std::move(jt));
    }
    j["groups"] = json::array();
    for (const auto& g : a.groups)
      j["groups"].push_back({{"activity", g.activity}, {"members", g.members}});
    j["singletons"] = a.singletons;
    ann << j.dump() << "\n";

    const fs::path frame_dir = fs::path(dir) / "frames" / a.clip_id;
    fs::create_directories(frame_dir);
    for (std::size_t f = 0; f < clip.frames.size(); ++f) {
      std::ostringstream name;
      name << "f" << std::setw(4) << std::setfill('0') << f << ".ppm";
      write_ppm((frame_dir / name.str()).string(), clip.frames[f]);
    }
  }
}

std::vector<ClipAnnotation> load_annotations(const std::string& path, std::size_t max_groups) {
  std::ifstream f(path);
  if (!f) throw DataError("load_annotations: missing file " + path);
  std::vector<ClipAnnotation> clips;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(f, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw DataError("load_annotations: malformed record at line " + std::to_string(line_no) +
                      ": " + e.what());
    }
    try {
      if (j.value("schema_version", -1) != kAnnotationSchemaVersion)
        throw DataError("unsupported schema_version");
      ClipAnnotation a;
      a.clip_id = j.at("clip_id").get<std::string>();
      a.frame_count = j.at("frame_count").get<int>();
      a.width = j.at("width").get<int>();
      a.height = j.at("height").get<int>();
      for (const auto& jt : j.at("tracks")) {
        TrackAnnotation tr;
        tr.id = jt.at("id").get<int>();
        tr.action = jt.at("action").get<int>();
        for (const auto& jb : jt.at("boxes")) tr.boxes.push_back(box_from_json(jb));
        a.tracks.push_back(std::move(tr));
      }
      for (const auto& jg : j.at("groups")) {
        GroupAnnotation g;
        g.activity = jg.at("activity").get<int>();
        g.members = jg.at("members").get<std::vector<int>>();
        a.groups.push_back(std::move(g));
      }
      a.singletons = j.at("singletons").get<std::vector<int>>();
      a.validate(max_groups);
      clips.push_back(std::move(a));
    } catch (const json::exception& e) {
      throw DataError("load_annotations: malformed record at line " + std::to_string(line_no) +
                      ": " + e.what());
    }
  }
  if (clips.empty()) throw DataError("load_annotations: no records in " + path);
  return clips;
}

Image load_frame(const std::string& dataset_dir, const std::string& clip_id, int frame_index) {
  std::ostringstream name;
  name << "f" << std::setw(4) << std::setfill('0') << frame_index << ".ppm";
  return read_ppm((fs::path(dataset_dir) / "frames" / clip_id / name.str()).string());
}

bool is_validation_clip(const std::string& clip_id) {
  return fnv1a64(clip_id) % 5 == 4;
}

}  // namespace gad
