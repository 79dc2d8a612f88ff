#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "gfm/losses.hpp"

namespace gfm {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct OptimConfig {
  double lr = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  int steps = 50000;
  int batch = 512;
};

struct EvalConfig {
  std::vector<int> nfe_list{1, 2, 5, 10, 20, 50, 100};
  int nll_steps = 100;
  double mmd_kappa = 1.0;
};

struct DatasetConfig {
  std::string source = "synthetic";  // synthetic | geodata_csv | angles_csv
  std::string path;
  int components = 4;
  double concentration = 20.0;
  int n_samples = 25000;
  double train_fraction = 0.8;
  uint64_t seed = 0;
};

struct ExperimentConfig {
  ManifoldSpec manifold{ManifoldKind::FlatTorus, 2};
  DatasetConfig dataset;
  LossConfig loss;
  MlpArch arch;
  OptimConfig optim;
  std::vector<uint64_t> seeds{0};
  EvalConfig eval;
  std::string output_dir = ".";
  int threads = 1;
  int log_every = 100;
};

// `key = value` lines with dotted keys; '#' starts a comment.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

// One dotted key, same vocabulary as the file format (CLI --key=value).
void apply_override(ExperimentConfig& cfg, const std::string& key, const std::string& value);

void validate(const ExperimentConfig& cfg);

}  // namespace gfm
