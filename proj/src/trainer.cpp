#include "gad/trainer.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <thread>

#include "gad/errors.hpp"

namespace gad {

GroupActivityModel::ClipInput sample_clip_input(const LoadedClip& clip, std::size_t frames,
                                                SampleMode mode, std::uint64_t seed) {
  const std::vector<int> idx =
      segment_sample(clip.annotation.frame_count, static_cast<int>(frames), mode, seed);
  GroupActivityModel::ClipInput input;
  for (int f : idx) {
    input.frames.push_back(clip.frames[static_cast<std::size_t>(f)]);
    std::vector<Box> boxes;
    for (const TrackAnnotation& tr : clip.annotation.tracks)
      boxes.push_back(tr.boxes[static_cast<std::size_t>(f)]);
    input.boxes.push_back(std::move(boxes));
  }
  return input;
}

Trainer::Trainer(const RunConfig& cfg, const LoadedDataset& data, GroupActivityModel& model)
    : cfg_(cfg), data_(data), model_(model) {
  train_indices_ = data_.split_indices(Split::train);
  if (train_indices_.empty()) throw DataError("trainer: dataset has no training clips");
  optimizer_ = AdamW(model_.trainable_parameters(), cfg_.optim());
}

EpochStats Trainer::run_epoch(std::size_t epoch) {
  const auto start = std::chrono::steady_clock::now();
  std::vector<std::size_t> order = train_indices_;
  Rng shuffle_rng(mix_seed(cfg_.seed, 0x7a11edu, epoch));
  shuffle_rng.shuffle(order);

  EpochStats stats;
  stats.epoch = epoch;
  std::size_t clips_done = 0;

  for (std::size_t batch_start = 0; batch_start < order.size();
       batch_start += cfg_.batch_size) {
    const std::size_t batch_end = std::min(order.size(), batch_start + cfg_.batch_size);
    const std::size_t batch = batch_end - batch_start;

    struct Slot {
      GradMap grads;
      GroupActivityModel::ClipLoss loss;
      std::string error;
    };
    std::vector<Slot> slots(batch);

    auto work = [&](std::size_t slot_index) {
      const std::size_t clip_index = order[batch_start + slot_index];
      const LoadedClip& clip = data_.clips[clip_index];
      try {
        const auto input = sample_clip_input(
            clip, cfg_.frames, SampleMode::train,
            mix_seed(cfg_.seed, epoch, static_cast<std::uint64_t>(clip_index)));
        const auto fwd = model_.forward(input);
        slots[slot_index].loss = model_.compute_loss(fwd, clip.targets, cfg_.losses());
        backward(slots[slot_index].loss.total, slots[slot_index].grads);
      } catch (const std::exception& e) {
        slots[slot_index].error = std::string(e.what()) + " (clip " + clip.annotation.clip_id + ")";
      }
    };

    const std::size_t workers =
        std::min<std::size_t>(batch, std::max(1u, std::thread::hardware_concurrency()));
    if (workers <= 1) {
      for (std::size_t s = 0; s < batch; ++s) work(s);
    } else {
      std::vector<std::thread> pool;
      for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w]() {
          for (std::size_t s = w; s < batch; s += workers) work(s);
        });
      }
      for (auto& th : pool) th.join();
    }

    optimizer_.zero_grad();
    const double inv_batch = 1.0 / static_cast<double>(batch);
    for (std::size_t s = 0; s < batch; ++s) {
      if (!slots[s].error.empty()) throw NumericError("training step failed: " + slots[s].error);
      apply_grad_map(slots[s].grads, inv_batch);
      stats.action += slots[s].loss.action;
      stats.group += slots[s].loss.group;
      stats.member += slots[s].loss.member;
      stats.contrast += slots[s].loss.contrast;
      stats.total += slots[s].loss.total.scalar_value();
    }
    optimizer_.step();
    clips_done += batch;
  }

  const double inv = 1.0 / static_cast<double>(clips_done);
  stats.action *= inv;
  stats.group *= inv;
  stats.member *= inv;
  stats.contrast *= inv;
  stats.total *= inv;
  if (!std::isfinite(stats.total))
    throw NumericError("epoch " + std::to_string(epoch) + ": non-finite mean loss");
  stats.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return stats;
}

void Trainer::run(std::size_t from_epoch, std::size_t to_epoch, std::ostream* log,
                  const EpochCallback& callback) {
  for (std::size_t epoch = from_epoch + 1; epoch <= to_epoch; ++epoch) {
    const EpochStats stats = run_epoch(epoch);
    if (log) *log << format_epoch_log(stats) << std::endl;
    if (callback && callback(stats)) break;
  }
}

std::string format_epoch_log(const EpochStats& s) {
  std::ostringstream os;
  os << std::setprecision(12);
  os << "epoch=" << s.epoch << " l_ind=" << s.action << " l_group=" << s.group
     << " l_mem=" << s.member << " l_con=" << s.contrast << " total=" << s.total
     << " time_s=" << std::setprecision(3) << s.seconds;
  return os.str();
}

}  // namespace gad
