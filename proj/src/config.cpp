#include "gad/config.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

#include "gad/errors.hpp"

namespace gad {

ModelConfig RunConfig::model() const {
  ModelConfig m;
  m.backbone.image_size = image_size;
  m.backbone.patch_size = patch_size;
  m.backbone.channels = channels;
  m.backbone.layers = backbone_layers;
  m.backbone.model_dim = model_dim;
  m.backbone.heads = backbone_heads;
  m.backbone.ffn_hidden = backbone_ffn_hidden;
  m.backbone.prompt_mode = parse_prompt_mode(prompt_mode);
  m.backbone.prompt_count = group_tokens;
  m.backbone.frozen = frozen;
  m.gct_heads = gct_heads;
  m.gct_ffn_hidden = gct_ffn_hidden;
  m.group_tokens = group_tokens;
  m.frames = frames;
  m.activities = activities;
  m.actions = actions;
  m.outlier_mode = parse_outlier_mode(outlier_mode);
  return m;
}

OptimConfig RunConfig::optim() const {
  return OptimConfig{lr, beta1, beta2, adam_epsilon, weight_decay};
}

LossConfig RunConfig::losses() const { return LossConfig{lambda_m, lambda_c, tau, aux_layers}; }

void RunConfig::validate() const {
  model().validate();
  losses().validate();
  synthetic.validate();
  if (epochs == 0 || batch_size == 0)
    throw ConfigError("RunConfig: epochs and batch_size must be positive");
  if (lr <= 0.0) throw ConfigError("RunConfig: lr must be positive");
  if (thresholds.empty()) throw ConfigError("RunConfig: at least one eval threshold required");
  for (double t : thresholds) {
    if (!(t > 0.0 && t <= 1.0)) throw ConfigError("RunConfig: thresholds must lie in (0,1]");
  }
  if (frames > static_cast<std::size_t>(synthetic.frame_count))
    throw ConfigError("RunConfig: frames (T) exceeds synthetic frame_count");
}

namespace {

bool parse_bool(const std::string& v, const std::string& key) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("config key '" + key + "': expected boolean, got '" + v + "'");
}

std::size_t parse_size(const std::string& v, const std::string& key) {
  try {
    const long long x = std::stoll(v);
    if (x < 0) throw ConfigError("config key '" + key + "': negative value");
    return static_cast<std::size_t>(x);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': expected integer, got '" + v + "'");
  }
}

int parse_int(const std::string& v, const std::string& key) {
  try {
    return std::stoi(v);
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': expected integer, got '" + v + "'");
  }
}

double parse_real(const std::string& v, const std::string& key) {
  try {
    return std::stod(v);
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': expected real, got '" + v + "'");
  }
}

}  // namespace

std::vector<double> parse_thresholds(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(parse_real(item, "thresholds"));
  }
  if (out.empty()) throw ConfigError("thresholds: empty list");
  return out;
}

void apply_config_line(RunConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "seed") cfg.seed = static_cast<std::uint64_t>(std::stoull(value));
  else if (key == "image_size") cfg.image_size = parse_size(value, key);
  else if (key == "patch_size") cfg.patch_size = parse_size(value, key);
  else if (key == "channels") cfg.channels = parse_size(value, key);
  else if (key == "backbone_layers") cfg.backbone_layers = parse_size(value, key);
  else if (key == "model_dim") cfg.model_dim = parse_size(value, key);
  else if (key == "backbone_heads") cfg.backbone_heads = parse_size(value, key);
  else if (key == "backbone_ffn_hidden") cfg.backbone_ffn_hidden = parse_size(value, key);
  else if (key == "prompt_mode") cfg.prompt_mode = value;
  else if (key == "frozen") cfg.frozen = parse_bool(value, key);
  else if (key == "gct_heads") cfg.gct_heads = parse_size(value, key);
  else if (key == "gct_ffn_hidden") cfg.gct_ffn_hidden = parse_size(value, key);
  else if (key == "group_tokens") cfg.group_tokens = parse_size(value, key);
  else if (key == "frames") cfg.frames = parse_size(value, key);
  else if (key == "activities") cfg.activities = parse_size(value, key);
  else if (key == "actions") cfg.actions = parse_size(value, key);
  else if (key == "outlier_mode") cfg.outlier_mode = value;
  else if (key == "epochs") cfg.epochs = parse_size(value, key);
  else if (key == "batch_size") cfg.batch_size = parse_size(value, key);
  else if (key == "lr") cfg.lr = parse_real(value, key);
  else if (key == "beta1") cfg.beta1 = parse_real(value, key);
  else if (key == "beta2") cfg.beta2 = parse_real(value, key);
  else if (key == "adam_epsilon") cfg.adam_epsilon = parse_real(value, key);
  else if (key == "weight_decay") cfg.weight_decay = parse_real(value, key);
  else if (key == "checkpoint_every") cfg.checkpoint_every = parse_size(value, key);
  else if (key == "lambda_m") cfg.lambda_m = parse_real(value, key);
  else if (key == "lambda_c") cfg.lambda_c = parse_real(value, key);
  else if (key == "tau") cfg.tau = parse_real(value, key);
  else if (key == "aux_layers") cfg.aux_layers = parse_bool(value, key);
  else if (key == "thresholds") cfg.thresholds = parse_thresholds(value);
  else if (key == "synthetic_clips") cfg.synthetic.clips = parse_int(value, key);
  else if (key == "synthetic_min_actors") cfg.synthetic.min_actors = parse_int(value, key);
  else if (key == "synthetic_max_actors") cfg.synthetic.max_actors = parse_int(value, key);
  else if (key == "synthetic_min_groups") cfg.synthetic.min_groups = parse_int(value, key);
  else if (key == "synthetic_max_groups") cfg.synthetic.max_groups = parse_int(value, key);
  else if (key == "synthetic_min_group_size") cfg.synthetic.min_group_size = parse_int(value, key);
  else if (key == "synthetic_max_group_size") cfg.synthetic.max_group_size = parse_int(value, key);
  else if (key == "synthetic_max_singletons") cfg.synthetic.max_singletons = parse_int(value, key);
  else if (key == "synthetic_frame_count") cfg.synthetic.frame_count = parse_int(value, key);
  else throw ConfigError("unknown config key '" + key + "'");
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("config file not found: " + path);
  RunConfig cfg;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(f, line)) {
    ++line_no;
    const std::size_t comment = line.find('#');
    if (comment != std::string::npos) line = line.substr(0, comment);
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      bool blank = true;
      for (char c : line)
        if (!std::isspace(static_cast<unsigned char>(c))) blank = false;
      if (blank) continue;
      throw ConfigError(path + ":" + std::to_string(line_no) + ": expected 'key = value'");
    }
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    apply_config_line(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  // keep the generator's class counts and pixel geometry in sync with the model
  cfg.synthetic.activities = static_cast<int>(cfg.activities);
  cfg.synthetic.actions = static_cast<int>(cfg.actions);
  cfg.synthetic.width = static_cast<int>(cfg.image_size);
  cfg.synthetic.height = static_cast<int>(cfg.image_size);
  cfg.synthetic.seed = cfg.seed;
  return cfg;
}

void echo_config(const RunConfig& cfg, std::ostream& os) {
  os << "seed = " << cfg.seed << "\n";
  os << "image_size = " << cfg.image_size << "\n";
  os << "patch_size = " << cfg.patch_size << "\n";
  os << "channels = " << cfg.channels << "\n";
  os << "backbone_layers = " << cfg.backbone_layers << "\n";
  os << "model_dim = " << cfg.model_dim << "\n";
  os << "backbone_heads = " << cfg.backbone_heads << "\n";
  os << "backbone_ffn_hidden = " << cfg.backbone_ffn_hidden << "\n";
  os << "prompt_mode = " << cfg.prompt_mode << "\n";
  os << "frozen = " << (cfg.frozen ? "true" : "false") << "\n";
  os << "gct_heads = " << cfg.gct_heads << "\n";
  os << "gct_ffn_hidden = " << cfg.gct_ffn_hidden << "\n";
  os << "group_tokens = " << cfg.group_tokens << "\n";
  os << "frames = " << cfg.frames << "\n";
  os << "activities = " << cfg.activities << "\n";
  os << "actions = " << cfg.actions << "\n";
  os << "outlier_mode = " << cfg.outlier_mode << "\n";
  os << "epochs = " << cfg.epochs << "\n";
  os << "batch_size = " << cfg.batch_size << "\n";
  os << "lr = " << cfg.lr << "\n";
  os << "beta1 = " << cfg.beta1 << "\n";
  os << "beta2 = " << cfg.beta2 << "\n";
  os << "adam_epsilon = " << cfg.adam_epsilon << "\n";
  os << "weight_decay = " << cfg.weight_decay << "\n";
  os << "checkpoint_every = " << cfg.checkpoint_every << "\n";
  os << "lambda_m = " << cfg.lambda_m << "\n";
  os << "lambda_c = " << cfg.lambda_c << "\n";
  os << "tau = " << cfg.tau << "\n";
  os << "aux_layers = " << (cfg.aux_layers ? "true" : "false") << "\n";
  os << "thresholds = ";
  for (std::size_t i = 0; i < cfg.thresholds.size(); ++i)
    os << (i ? "," : "") << cfg.thresholds[i];
  os << "\n";
  os << "synthetic_clips = " << cfg.synthetic.clips << "\n";
  os << "synthetic_min_actors = " << cfg.synthetic.min_actors << "\n";
  os << "synthetic_max_actors = " << cfg.synthetic.max_actors << "\n";
  os << "synthetic_min_groups = " << cfg.synthetic.min_groups << "\n";
  os << "synthetic_max_groups = " << cfg.synthetic.max_groups << "\n";
  os << "synthetic_min_group_size = " << cfg.synthetic.min_group_size << "\n";
  os << "synthetic_max_group_size = " << cfg.synthetic.max_group_size << "\n";
  os << "synthetic_max_singletons = " << cfg.synthetic.max_singletons << "\n";
  os << "synthetic_frame_count = " << cfg.synthetic.frame_count << "\n";
}

void write_config(const RunConfig& cfg, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw DataError("write_config: cannot open " + path);
  echo_config(cfg, f);
}

}  // namespace gad
