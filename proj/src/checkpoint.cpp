#include "gad/checkpoint.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "gad/errors.hpp"
#include "gad/tensor_io.hpp"

namespace fs = std::filesystem;

namespace gad {

namespace {

std::string shape_csv(const Tensor& t) {
  std::ostringstream os;
  for (std::size_t i = 0; i < t.rank(); ++i) os << (i ? "," : "") << t.extent(i);
  return os.str();
}

}  // namespace

void save_checkpoint(const std::string& dir, const ParamList& params, AdamW* optimizer,
                     std::size_t epochs_done, const RunConfig& cfg) {
  fs::create_directories(fs::path(dir) / "params");
  std::ofstream manifest((fs::path(dir) / "manifest.txt").string());
  if (!manifest) throw DataError("save_checkpoint: cannot write manifest in " + dir);
  for (const auto& [name, p] : params) {
    manifest << name << "\t" << shape_csv(p->value) << "\t" << (p->trainable ? 1 : 0) << "\n";
    write_tensor((fs::path(dir) / "params" / (name + ".ten")).string(), p->value);
  }
  if (optimizer) {
    fs::create_directories(fs::path(dir) / "optim");
    const ParamList& opt_params = optimizer->params();
    for (std::size_t i = 0; i < opt_params.size(); ++i) {
      write_tensor((fs::path(dir) / "optim" / (opt_params[i].first + ".m.ten")).string(),
                   optimizer->first_moment(i));
      write_tensor((fs::path(dir) / "optim" / (opt_params[i].first + ".v.ten")).string(),
                   optimizer->second_moment(i));
    }
    std::ofstream opt_state((fs::path(dir) / "optim" / "state.txt").string());
    opt_state << "step = " << optimizer->step_count() << "\n";
  }
  std::ofstream state((fs::path(dir) / "state.txt").string());
  state << "epochs_done = " << epochs_done << "\n";
  write_config(cfg, (fs::path(dir) / "config.cfg").string());
}

std::vector<ManifestEntry> read_manifest(const std::string& dir) {
  std::ifstream manifest((fs::path(dir) / "manifest.txt").string());
  if (!manifest) throw DataError("checkpoint manifest not found in " + dir);
  std::vector<ManifestEntry> entries;
  std::string line;
  while (std::getline(manifest, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    ManifestEntry e;
    std::string shape, trainable;
    if (!std::getline(ss, e.name, '\t') || !std::getline(ss, shape, '\t') ||
        !std::getline(ss, trainable))
      throw DataError("checkpoint manifest: malformed line '" + line + "'");
    e.elements = 1;
    std::stringstream sh(shape);
    std::string ext;
    while (std::getline(sh, ext, ',')) e.elements *= static_cast<std::size_t>(std::stoull(ext));
    e.trainable = trainable == "1";
    entries.push_back(std::move(e));
  }
  return entries;
}

CheckpointState load_checkpoint(const std::string& dir, const ParamList& params,
                                AdamW* optimizer) {
  const std::vector<ManifestEntry> manifest = read_manifest(dir);
  if (manifest.size() != params.size())
    throw ConfigError("checkpoint/config mismatch: manifest has " +
                      std::to_string(manifest.size()) + " parameters, model has " +
                      std::to_string(params.size()));
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (manifest[i].name != params[i].first)
      throw ConfigError("checkpoint/config mismatch: parameter '" + manifest[i].name +
                        "' vs model '" + params[i].first + "'");
    Tensor t = read_tensor((fs::path(dir) / "params" / (params[i].first + ".ten")).string());
    if (!t.same_shape(params[i].second->value))
      throw ConfigError("checkpoint/config mismatch: shape of '" + params[i].first + "' is " +
                        t.shape_str() + ", model expects " +
                        params[i].second->value.shape_str());
    params[i].second->value = std::move(t);
  }
  if (optimizer) {
    const fs::path opt_dir = fs::path(dir) / "optim";
    if (fs::exists(opt_dir)) {
      const ParamList& opt_params = optimizer->params();
      for (std::size_t i = 0; i < opt_params.size(); ++i) {
        optimizer->first_moment(i) =
            read_tensor((opt_dir / (opt_params[i].first + ".m.ten")).string());
        optimizer->second_moment(i) =
            read_tensor((opt_dir / (opt_params[i].first + ".v.ten")).string());
      }
      std::ifstream opt_state((opt_dir / "state.txt").string());
      std::string line;
      while (std::getline(opt_state, line)) {
        const auto eq = line.find('=');
        if (eq != std::string::npos && line.substr(0, eq).find("step") != std::string::npos)
          optimizer->set_step_count(std::stoll(line.substr(eq + 1)));
      }
    }
  }
  CheckpointState state;
  state.config = parse_config_file((fs::path(dir) / "config.cfg").string());
  std::ifstream st((fs::path(dir) / "state.txt").string());
  std::string line;
  while (std::getline(st, line)) {
    const auto eq = line.find('=');
    if (eq != std::string::npos && line.substr(0, eq).find("epochs_done") != std::string::npos)
      state.epochs_done = static_cast<std::size_t>(std::stoull(line.substr(eq + 1)));
  }
  return state;
}

}  // namespace gad
