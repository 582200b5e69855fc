#pragma once

#include <functional>
#include <iosfwd>
#include <string>

#include "gad/config.hpp"
#include "gad/dataset.hpp"
#include "gad/model.hpp"
#include "gad/optim.hpp"

namespace gad {

struct EpochStats {
  std::size_t epoch = 0;
  double action = 0.0, group = 0.0, member = 0.0, contrast = 0.0, total = 0.0;
  double seconds = 0.0;
};

// Mini-batch training over the train split. Per-clip graphs are evaluated in
// parallel worker threads; gradients are reduced in clip order, so runs are
// reproducible regardless of scheduling.
class Trainer {
 public:
  // Return true from the callback to stop after the current epoch.
  using EpochCallback = std::function<bool(const EpochStats&)>;

  Trainer(const RunConfig& cfg, const LoadedDataset& data, GroupActivityModel& model);

  // Runs epochs (from_epoch+1 .. to_epoch]; logs one line per epoch.
  void run(std::size_t from_epoch, std::size_t to_epoch, std::ostream* log,
           const EpochCallback& callback = nullptr);
  EpochStats run_epoch(std::size_t epoch);

  AdamW& optimizer() { return optimizer_; }
  std::size_t train_clip_count() const { return train_indices_.size(); }

 private:
  const RunConfig& cfg_;
  const LoadedDataset& data_;
  GroupActivityModel& model_;
  AdamW optimizer_;
  std::vector<std::size_t> train_indices_;
};

GroupActivityModel::ClipInput sample_clip_input(const LoadedClip& clip, std::size_t frames,
                                                SampleMode mode, std::uint64_t seed);

std::string format_epoch_log(const EpochStats& s);

}  // namespace gad
