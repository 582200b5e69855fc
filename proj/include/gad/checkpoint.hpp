#pragma once

#include <string>

#include "gad/config.hpp"
#include "gad/optim.hpp"
#include "gad/tensor.hpp"

namespace gad {

// Checkpoint directory layout: manifest.txt (name, shape, trainable flag per
// line), params/<name>.ten in the tensor file format, optimizer moments under
// optim/, the echoed run config and a state file with epoch/step counters.
void save_checkpoint(const std::string& dir, const ParamList& params, AdamW* optimizer,
                     std::size_t epochs_done, const RunConfig& cfg);

struct CheckpointState {
  std::size_t epochs_done = 0;
  RunConfig config;
};

// Loads values into `params`; shapes and names must match the manifest
// exactly. Optimizer state is restored when `optimizer` is non-null and the
// checkpoint carries it.
CheckpointState load_checkpoint(const std::string& dir, const ParamList& params,
                                AdamW* optimizer);

// Manifest introspection (name, element count, trainable).
struct ManifestEntry {
  std::string name;
  std::size_t elements = 0;
  bool trainable = false;
};
std::vector<ManifestEntry> read_manifest(const std::string& dir);

}  // namespace gad
