#include "gad/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <ostream>

#include "gad/grad_check.hpp"
#include "gad/losses.hpp"
#include "gad/metrics.hpp"
#include "gad/model.hpp"
#include "gad/rng.hpp"

namespace gad {

namespace {

ModelConfig tiny_model_config() {
  ModelConfig cfg;
  cfg.backbone.image_size = 16;
  cfg.backbone.patch_size = 4;
  cfg.backbone.layers = 2;
  cfg.backbone.model_dim = 8;
  cfg.backbone.heads = 2;
  cfg.backbone.ffn_hidden = 16;
  cfg.backbone.prompt_mode = PromptMode::deep;
  cfg.backbone.prompt_count = 3;
  cfg.backbone.frozen = false;
  cfg.gct_heads = 2;
  cfg.gct_ffn_hidden = 16;
  cfg.group_tokens = 3;
  cfg.frames = 2;
  cfg.activities = 3;
  cfg.actions = 3;
  return cfg;
}

Image noise_image(std::size_t size, Rng& rng) {
  Image img(size, size, 3);
  for (auto& p : img.pixels) p = static_cast<std::uint8_t>(rng.uniform_int(0, 255));
  return img;
}

GroupActivityModel::ClipInput random_clip_input(const ModelConfig& cfg, std::size_t actors,
                                                Rng& rng) {
  GroupActivityModel::ClipInput input;
  for (std::size_t t = 0; t < cfg.frames; ++t) {
    input.frames.push_back(noise_image(cfg.backbone.image_size, rng));
    std::vector<Box> boxes;
    for (std::size_t a = 0; a < actors; ++a) {
      const double x0 = rng.uniform(0.0, 0.6), y0 = rng.uniform(0.0, 0.6);
      boxes.push_back({x0, y0, x0 + rng.uniform(0.1, 0.35), y0 + rng.uniform(0.1, 0.35)});
    }
    input.boxes.push_back(std::move(boxes));
  }
  return input;
}

ClipTargets random_targets(std::size_t actors, const ModelConfig& cfg, Rng& rng) {
  ClipTargets gt;
  gt.groups = {{0, 1}, {2, 3}};
  gt.activities = {static_cast<int>(rng.uniform_int(0, static_cast<int>(cfg.activities) - 1)),
                   static_cast<int>(rng.uniform_int(0, static_cast<int>(cfg.activities) - 1))};
  for (std::size_t a = 4; a < actors; ++a) gt.singletons.push_back(static_cast<int>(a));
  for (std::size_t a = 0; a < actors; ++a)
    gt.actions.push_back(static_cast<int>(rng.uniform_int(0, static_cast<int>(cfg.actions) - 1)));
  return gt;
}

double exhaustive_min_assignment(const std::vector<std::vector<double>>& cost) {
  const std::size_t n = cost.size(), m = cost[0].size();
  std::vector<int> cols(m);
  std::iota(cols.begin(), cols.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  if (n <= m) {
    std::sort(cols.begin(), cols.end());
    do {
      double total = 0.0;
      for (std::size_t i = 0; i < n; ++i) total += cost[i][static_cast<std::size_t>(cols[i])];
      best = std::min(best, total);
    } while (std::next_permutation(cols.begin(), cols.end()));
  } else {
    std::vector<int> rows(n);
    std::iota(rows.begin(), rows.end(), 0);
    do {
      double total = 0.0;
      for (std::size_t j = 0; j < m; ++j) total += cost[static_cast<std::size_t>(rows[j])][j];
      best = std::min(best, total);
    } while (std::next_permutation(rows.begin(), rows.end()));
  }
  return best;
}

SelfTestResult gradient_suite() {
  SelfTestResult res{"gradient_check", true, 0.0, ""};
  const ModelConfig cfg = tiny_model_config();
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    GroupActivityModel model(cfg, seed);
    Rng rng(mix_seed(seed, 0xabcdu));
    const std::size_t actors = 5;
    const auto input = random_clip_input(cfg, actors, rng);
    const auto gt = random_targets(actors, cfg, rng);
    const LossConfig losses;
    const auto fn = [&]() { return model.compute_loss(model.forward(input), gt, losses).total; };
    const auto report = grad_check(fn, model.parameters(), 1e-5);
    res.max_error = std::max(res.max_error, report.max_rel_err);
    if (report.max_rel_err > 1e-4) {
      res.passed = false;
      res.detail = "worst " + report.worst_param;
    }
  }
  return res;
}

SelfTestResult hungarian_suite() {
  SelfTestResult res{"hungarian_vs_enumeration", true, 0.0, ""};
  Rng rng(20240811);
  for (std::size_t n = 2; n <= 6 && res.passed; ++n) {
    for (int rep = 0; rep < 60; ++rep) {
      std::vector<std::vector<double>> cost(n, std::vector<double>(n));
      for (auto& row : cost)
        for (double& c : row) c = rng.uniform(-1.0, 1.0);
      const double solver = hungarian(cost).total_cost;
      const double oracle = exhaustive_min_assignment(cost);
      res.max_error = std::max(res.max_error, std::fabs(solver - oracle));
      if (solver != oracle) {
        res.passed = false;
        res.detail = "mismatch at n=" + std::to_string(n);
        break;
      }
    }
  }
  // deterministic tie rule on the all-equal matrix
  const Assignment tie = hungarian({{1, 1, 1}, {1, 1, 1}, {1, 1, 1}});
  for (int i = 0; i < 3; ++i) {
    if (tie.row_to_col[static_cast<std::size_t>(i)] != i) {
      res.passed = false;
      res.detail = "tie rule violated";
    }
  }
  return res;
}

SelfTestResult metric_suite() {
  SelfTestResult res{"metrics_vs_brute_force", true, 0.0, ""};
  Rng rng(77);
  for (int rep = 0; rep < 30 && res.passed; ++rep) {
    // one toy clip with exact predictions plus noise clips
    std::vector<EvalRecord> records;
    for (int c = 0; c < 4; ++c) {
      EvalRecord rec;
      rec.clip_id = "t" + std::to_string(c);
      const int actors = static_cast<int>(rng.uniform_int(4, 8));
      for (int a = 0; a < actors; ++a) {
        rec.gt_actions.push_back(static_cast<int>(rng.uniform_int(0, 2)));
        rec.predicted_actions.push_back(static_cast<int>(rng.uniform_int(0, 2)));
      }
      rec.gt_groups = {{0, 1}, {2, 3}};
      rec.gt_activities = {static_cast<int>(rng.uniform_int(0, 2)),
                           static_cast<int>(rng.uniform_int(0, 2))};
      for (int a = 4; a < actors; ++a) rec.gt_singletons.push_back(a);
      rec.predicted_assignment.assign(static_cast<std::size_t>(actors), kOutlier);
      for (int a = 0; a < 4 && a < actors; ++a)
        rec.predicted_assignment[static_cast<std::size_t>(a)] = a / 2;
      GroupPrediction p0{{0, 1}, rec.gt_activities[0], rng.uniform(0.3, 1.0)};
      GroupPrediction p1{{2, 3}, static_cast<int>(rng.uniform_int(0, 2)), rng.uniform(0.3, 1.0)};
      rec.predictions = {p0, p1};
      records.push_back(std::move(rec));
    }
    // individual accuracy against direct counting
    std::size_t correct = 0, total = 0;
    for (const auto& rec : records)
      for (std::size_t i = 0; i < rec.gt_actions.size(); ++i) {
        ++total;
        if (rec.gt_actions[i] == rec.predicted_actions[i]) ++correct;
      }
    const double expect = static_cast<double>(correct) / static_cast<double>(total);
    const double got = individual_accuracy(records);
    res.max_error = std::max(res.max_error, std::fabs(expect - got));
    if (std::fabs(expect - got) > 1e-12) {
      res.passed = false;
      res.detail = "individual accuracy mismatch";
    }
    // threshold monotonicity
    const double m05 = group_map(records, 0.5, 3), m10 = group_map(records, 1.0, 3);
    if (m05 + 1e-12 < m10) {
      res.passed = false;
      res.detail = "mAP monotonicity violated";
    }
  }
  return res;
}

SelfTestResult permutation_suite() {
  SelfTestResult res{"permutation_properties", true, 0.0, ""};
  const ModelConfig cfg = tiny_model_config();
  GroupActivityModel model(cfg, 5);
  Rng rng(99);
  const std::size_t actors = 5;
  const auto input = random_clip_input(cfg, actors, rng);
  auto permuted = input;
  std::vector<std::size_t> perm(actors);
  std::iota(perm.begin(), perm.end(), 0);
  rng.shuffle(perm);
  for (std::size_t t = 0; t < permuted.boxes.size(); ++t) {
    for (std::size_t a = 0; a < actors; ++a)
      permuted.boxes[t][a] = input.boxes[t][perm[a]];
  }
  const auto base = model.forward(input);
  const auto shuffled = model.forward(permuted);
  for (std::size_t t = 0; t < cfg.frames; ++t) {
    const Tensor& g0 = base.gct.groups_ctx[t].value();
    const Tensor& g1 = shuffled.gct.groups_ctx[t].value();
    for (std::size_t i = 0; i < g0.size(); ++i)
      res.max_error = std::max(res.max_error, std::fabs(g0.at(i) - g1.at(i)));
    const Tensor& a0 = base.gct.actors_ctx[t].value();
    const Tensor& a1 = shuffled.gct.actors_ctx[t].value();
    for (std::size_t r = 0; r < actors; ++r)
      for (std::size_t c = 0; c < a0.cols(); ++c)
        res.max_error =
            std::max(res.max_error, std::fabs(a1.at2(r, c) - a0.at2(perm[r], c)));
  }
  if (res.max_error > 1e-12) {
    res.passed = false;
    res.detail = "permutation equivariance violated";
  }
  return res;
}

}  // namespace

std::vector<SelfTestResult> run_selftest(std::ostream& os) {
  std::vector<SelfTestResult> results;
  results.push_back(gradient_suite());
  results.push_back(hungarian_suite());
  results.push_back(metric_suite());
  results.push_back(permutation_suite());
  for (const auto& r : results) {
    os << (r.passed ? "[PASS] " : "[FAIL] ") << r.suite << " max_error="
       << std::scientific << std::setprecision(3) << r.max_error;
    if (!r.detail.empty()) os << " (" << r.detail << ")";
    os << "\n" << std::defaultfloat;
  }
  return results;
}

}  // namespace gad
