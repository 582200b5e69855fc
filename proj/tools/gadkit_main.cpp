#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "gad/checkpoint.hpp"
#include "gad/config.hpp"
#include "gad/dataset.hpp"
#include "gad/errors.hpp"
#include "gad/evaluate.hpp"
#include "gad/model.hpp"
#include "gad/selftest.hpp"
#include "gad/trainer.hpp"

namespace fs = std::filesystem;
using namespace gad;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

struct CommonOpts {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> prompt_mode;
  std::optional<bool> frozen;
};

RunConfig effective_config(const CommonOpts& opts) {
  RunConfig cfg = opts.config_path.empty() ? RunConfig{} : parse_config_file(opts.config_path);
  if (opts.seed) {
    cfg.seed = *opts.seed;
    cfg.synthetic.seed = *opts.seed;
  }
  if (opts.prompt_mode) cfg.prompt_mode = *opts.prompt_mode;
  if (opts.frozen) cfg.frozen = *opts.frozen;
  cfg.validate();
  return cfg;
}

int cmd_generate(const CommonOpts& opts, const std::string& out_dir,
                 std::optional<int> clip_count) {
  RunConfig cfg = effective_config(opts);
  if (clip_count) cfg.synthetic.clips = *clip_count;
  cfg.synthetic.validate();
  const auto clips = generate_synthetic(cfg.synthetic);
  save_dataset(out_dir, clips);
  write_config(cfg, (fs::path(out_dir) / "effective.cfg").string());
  std::cout << "generated " << clips.size() << " clips in " << out_dir << "\n";
  return kExitOk;
}

struct TrainResultPaths {
  std::string checkpoint_dir;
};

TrainResultPaths train_once(RunConfig cfg, const LoadedDataset& data, const std::string& out_dir,
                            const std::string& resume_dir) {
  fs::create_directories(out_dir);
  write_config(cfg, (fs::path(out_dir) / "effective.cfg").string());

  GroupActivityModel model(cfg.model(), cfg.seed);
  model.set_frozen(cfg.frozen);
  Trainer trainer(cfg, data, model);

  std::size_t from_epoch = 0;
  if (!resume_dir.empty()) {
    const CheckpointState state =
        load_checkpoint(resume_dir, model.parameters(), &trainer.optimizer());
    from_epoch = state.epochs_done;
    std::cout << "resumed from " << resume_dir << " at epoch " << from_epoch << "\n";
  }

  const std::string ckpt_dir = (fs::path(out_dir) / "checkpoint").string();
  std::ofstream log((fs::path(out_dir) / "train_log.txt").string(),
                    from_epoch == 0 ? std::ios::trunc : std::ios::app);
  trainer.run(from_epoch, cfg.epochs, &log, [&](const EpochStats& stats) {
    std::cout << format_epoch_log(stats) << "\n";
    if (cfg.checkpoint_every > 0 && stats.epoch % cfg.checkpoint_every == 0)
      save_checkpoint(ckpt_dir, model.parameters(), &trainer.optimizer(), stats.epoch, cfg);
    return false;
  });
  save_checkpoint(ckpt_dir, model.parameters(), &trainer.optimizer(), cfg.epochs, cfg);
  std::cout << "checkpoint written to " << ckpt_dir << "\n";
  return {ckpt_dir};
}

int cmd_train(const CommonOpts& opts, const std::string& data_dir, const std::string& out_dir,
              const std::string& resume_dir, bool prompt_sweep) {
  RunConfig cfg = effective_config(opts);
  const LoadedDataset data = LoadedDataset::load(data_dir, cfg.group_tokens);

  if (!prompt_sweep) {
    train_once(cfg, data, out_dir, resume_dir);
    return kExitOk;
  }

  // prompt-strategy harness: identical seed protocol across the three modes
  std::ostringstream table;
  table << "prompt_mode group_map@0.50 group_map@1.00 outlier_miou individual_acc "
           "membership_acc social_acc trainable_params\n";
  for (const std::string mode : {"none", "shallow", "deep"}) {
    RunConfig mode_cfg = cfg;
    mode_cfg.prompt_mode = mode;
    const std::string mode_out = (fs::path(out_dir) / mode).string();
    train_once(mode_cfg, data, mode_out, "");
    GroupActivityModel model(mode_cfg.model(), mode_cfg.seed);
    model.set_frozen(mode_cfg.frozen);
    load_checkpoint((fs::path(mode_out) / "checkpoint").string(), model.parameters(), nullptr);
    const auto records = predict_records(model, data, Split::train);
    const MetricsReport report =
        compute_metrics(model, records, {0.5, 1.0}, mode_cfg.activities);
    table << mode << std::fixed << std::setprecision(4) << " " << report.map_at.at(0.5) << " "
          << report.map_at.at(1.0) << " " << report.outlier_miou << " "
          << report.individual_accuracy << " " << report.membership_accuracy << " "
          << report.social_accuracy << " " << report.trainable_params << "\n";
  }
  fs::create_directories(out_dir);
  std::ofstream sweep((fs::path(out_dir) / "sweep_report.txt").string());
  sweep << table.str();
  std::cout << table.str();
  return kExitOk;
}

int cmd_eval(const std::string& checkpoint_dir, const std::string& data_dir,
             const std::string& thresholds_csv, const std::string& split_name,
             const std::string& features_dir, const std::string& out_dir) {
  RunConfig cfg = parse_config_file((fs::path(checkpoint_dir) / "config.cfg").string());
  if (!thresholds_csv.empty()) cfg.thresholds = parse_thresholds(thresholds_csv);
  cfg.validate();
  GroupActivityModel model(cfg.model(), cfg.seed);
  model.set_frozen(cfg.frozen);
  load_checkpoint(checkpoint_dir, model.parameters(), nullptr);
  const LoadedDataset data = LoadedDataset::load(data_dir, cfg.group_tokens);
  const std::optional<std::string> features =
      features_dir.empty() ? std::nullopt : std::make_optional(features_dir);
  const auto records = predict_records(model, data, parse_split(split_name), features);
  const MetricsReport report = compute_metrics(model, records, cfg.thresholds, cfg.activities);
  write_metrics_report(report, std::cout);
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    std::ofstream rf((fs::path(out_dir) / "eval_report.txt").string());
    write_metrics_report(report, rf);
    write_predictions_jsonl(records, (fs::path(out_dir) / "predictions.jsonl").string());
  }
  return kExitOk;
}

int cmd_dump_attn(const std::string& checkpoint_dir, const std::string& data_dir,
                  const std::string& clip_id, const std::string& out_dir) {
  RunConfig cfg = parse_config_file((fs::path(checkpoint_dir) / "config.cfg").string());
  cfg.validate();
  GroupActivityModel model(cfg.model(), cfg.seed);
  model.set_frozen(cfg.frozen);
  load_checkpoint(checkpoint_dir, model.parameters(), nullptr);
  const LoadedDataset data = LoadedDataset::load(data_dir, cfg.group_tokens);
  for (const LoadedClip& clip : data.clips) {
    if (clip.annotation.clip_id == clip_id) {
      dump_attention(model, clip, out_dir);
      std::cout << "attention maps for " << clip_id << " written to " << out_dir << "\n";
      return kExitOk;
    }
  }
  throw DataError("unknown clip id '" + clip_id + "'");
}

int cmd_selftest() {
  const auto results = run_selftest(std::cout);
  for (const auto& r : results) {
    if (!r.passed) return kExitNumeric;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"group activity detection toolkit"};
  app.require_subcommand(1);

  CommonOpts common;
  std::string data_dir, out_dir, resume_dir, checkpoint_dir, thresholds_csv, clip_id;
  std::string split_name = "all", features_dir;
  std::optional<int> clip_count;
  bool prompt_sweep = false;

  auto add_common = [&](CLI::App* cmd, bool with_model_flags) {
    cmd->add_option("--config", common.config_path, "key=value run configuration file");
    cmd->add_option("--seed", common.seed, "override the run seed");
    if (with_model_flags) {
      cmd->add_option("--prompt-mode", common.prompt_mode, "none|shallow|deep")
          ->check(CLI::IsMember({"none", "shallow", "deep"}));
      auto* frozen_flag = cmd->add_flag_callback(
          "--frozen", [&]() { common.frozen = true; }, "freeze backbone weights");
      cmd->add_flag_callback("--full-ft", [&]() { common.frozen = false; },
                             "train all weights")
          ->excludes(frozen_flag);
    }
  };

  CLI::App* generate = app.add_subcommand("generate", "write a synthetic dataset");
  add_common(generate, false);
  generate->add_option("--out", out_dir, "output dataset directory")->required();
  generate->add_option("--clips", clip_count, "override clip count");

  CLI::App* train = app.add_subcommand("train", "train a model");
  add_common(train, true);
  train->add_option("--data", data_dir, "dataset directory")->required();
  train->add_option("--out", out_dir, "run output directory")->required();
  train->add_option("--resume", resume_dir, "checkpoint directory to resume from");
  train->add_flag("--prompt-sweep", prompt_sweep,
                  "train none/shallow/deep under one seed and emit a comparison table");

  CLI::App* eval = app.add_subcommand("eval", "evaluate a checkpoint");
  eval->add_option("--checkpoint", checkpoint_dir, "checkpoint directory")->required();
  eval->add_option("--data", data_dir, "dataset directory")->required();
  eval->add_option("--thresholds", thresholds_csv, "comma-separated Group IoU thresholds");
  eval->add_option("--split", split_name, "train|val|all (default all)");
  eval->add_option("--features", features_dir,
                   "directory of externally computed patch-grid tensors");
  eval->add_option("--out", out_dir, "directory for the report and prediction records");

  CLI::App* dump = app.add_subcommand("dump-attn", "dump attention matrices and heat maps");
  dump->add_option("--checkpoint", checkpoint_dir, "checkpoint directory")->required();
  dump->add_option("--data", data_dir, "dataset directory")->required();
  dump->add_option("--clip", clip_id, "clip id")->required();
  dump->add_option("--out", out_dir, "output directory")->required();

  app.add_subcommand("selftest", "run gradient, solver and metric verification suites");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (app.got_subcommand("generate")) return cmd_generate(common, out_dir, clip_count);
    if (app.got_subcommand("train"))
      return cmd_train(common, data_dir, out_dir, resume_dir, prompt_sweep);
    if (app.got_subcommand("eval"))
      return cmd_eval(checkpoint_dir, data_dir, thresholds_csv, split_name, features_dir, out_dir);
    if (app.got_subcommand("dump-attn"))
      return cmd_dump_attn(checkpoint_dir, data_dir, clip_id, out_dir);
    if (app.got_subcommand("selftest")) return cmd_selftest();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitUsage;
}
