#include "gfm/config.hpp"

#include <fstream>
#include <sstream>

namespace gfm {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double to_real(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    double r = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return r;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a number, got '" + v + "'");
  }
}

long long to_int(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    long long r = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return r;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected an integer, got '" + v + "'");
  }
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

void apply_override(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  if (key == "manifold") {
    try {
      cfg.manifold = ManifoldSpec::parse(v);
    } catch (const std::exception& e) {
      throw ConfigError(std::string("manifold: ") + e.what());
    }
  } else if (key == "dataset.source") {
    if (v != "synthetic" && v != "geodata_csv" && v != "angles_csv")
      throw ConfigError("dataset.source: unknown source '" + v + "'");
    cfg.dataset.source = v;
  } else if (key == "dataset.path") {
    cfg.dataset.path = v;
  } else if (key == "dataset.components") {
    cfg.dataset.components = static_cast<int>(to_int(key, v));
  } else if (key == "dataset.concentration") {
    cfg.dataset.concentration = to_real(key, v);
  } else if (key == "dataset.n_samples") {
    cfg.dataset.n_samples = static_cast<int>(to_int(key, v));
  } else if (key == "dataset.train_fraction") {
    cfg.dataset.train_fraction = to_real(key, v);
  } else if (key == "dataset.seed") {
    cfg.dataset.seed = static_cast<uint64_t>(to_int(key, v));
  } else if (key == "loss.variant") {
    try {
      cfg.loss.variant = parse_loss_variant(v);
    } catch (const std::exception& e) {
      throw ConfigError(std::string("loss.variant: ") + e.what());
    }
  } else if (key == "loss.sd_weight") {
    cfg.loss.sd_weight = to_real(key, v);
  } else if (key == "loss.psd_midpoint") {
    cfg.loss.psd_midpoint = to_real(key, v);
  } else if (key == "arch.hidden") {
    cfg.arch.hidden = static_cast<int>(to_int(key, v));
  } else if (key == "arch.layers") {
    cfg.arch.layers = static_cast<int>(to_int(key, v));
  } else if (key == "arch.time_embed") {
    cfg.arch.time_embed = static_cast<int>(to_int(key, v));
  } else if (key == "optim.lr") {
    cfg.optim.lr = to_real(key, v);
  } else if (key == "optim.beta1") {
    cfg.optim.beta1 = to_real(key, v);
  } else if (key == "optim.beta2") {
    cfg.optim.beta2 = to_real(key, v);
  } else if (key == "optim.steps") {
    cfg.optim.steps = static_cast<int>(to_int(key, v));
  } else if (key == "optim.batch") {
    cfg.optim.batch = static_cast<int>(to_int(key, v));
  } else if (key == "seeds") {
    cfg.seeds.clear();
    for (const auto& s : split_list(v)) cfg.seeds.push_back(static_cast<uint64_t>(to_int(key, s)));
  } else if (key == "eval.nfe_list") {
    cfg.eval.nfe_list.clear();
    for (const auto& s : split_list(v))
      cfg.eval.nfe_list.push_back(static_cast<int>(to_int(key, s)));
  } else if (key == "eval.nll_steps") {
    cfg.eval.nll_steps = static_cast<int>(to_int(key, v));
  } else if (key == "eval.mmd_kappa") {
    cfg.eval.mmd_kappa = to_real(key, v);
  } else if (key == "output_dir") {
    cfg.output_dir = v;
  } else if (key == "threads") {
    cfg.threads = static_cast<int>(to_int(key, v));
  } else if (key == "log_every") {
    cfg.log_every = static_cast<int>(to_int(key, v));
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig cfg;
  std::stringstream ss(text);
  std::string line;
  size_t lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    apply_override(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.seeds.empty()) throw ConfigError("seeds: at least one seed required");
  if (cfg.optim.batch < 1) throw ConfigError("optim.batch: must be >= 1");
  if (cfg.optim.steps < 0) throw ConfigError("optim.steps: must be >= 0");
  if (!(cfg.optim.lr > 0)) throw ConfigError("optim.lr: must be > 0");
  if (cfg.arch.hidden < 1 || cfg.arch.layers < 1)
    throw ConfigError("arch: hidden and layers must be >= 1");
  if (cfg.arch.time_embed < 2 || cfg.arch.time_embed % 2 != 0)
    throw ConfigError("arch.time_embed: must be even and >= 2");
  if (!(cfg.loss.sd_weight >= 0)) throw ConfigError("loss.sd_weight: must be >= 0");
  if (!(cfg.loss.psd_midpoint > 0 && cfg.loss.psd_midpoint < 1))
    throw ConfigError("loss.psd_midpoint: must be in (0,1)");
  if (!(cfg.eval.mmd_kappa > 0)) throw ConfigError("eval.mmd_kappa: must be > 0");
  if (cfg.eval.nll_steps < 1) throw ConfigError("eval.nll_steps: must be >= 1");
  if (cfg.eval.nfe_list.empty()) throw ConfigError("eval.nfe_list: must be nonempty");
  if (!(cfg.dataset.train_fraction > 0 && cfg.dataset.train_fraction < 1))
    throw ConfigError("dataset.train_fraction: must be in (0,1)");
  if (cfg.dataset.source != "synthetic" && cfg.dataset.path.empty())
    throw ConfigError("dataset.path: required for file-backed datasets");
  if (cfg.threads < 1) throw ConfigError("threads: must be >= 1");
}

}  // namespace gfm
