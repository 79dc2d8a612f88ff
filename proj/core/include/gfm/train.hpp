#pragma once

#include <ostream>

#include "gfm/config.hpp"
#include "gfm/data.hpp"

namespace gfm {

struct TrainingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct AdamState {
  std::vector<double> m, v;
  long long t = 0;

  explicit AdamState(size_t n) : m(n, 0.0), v(n, 0.0) {}
};

void adam_step(std::vector<double>& theta, AdamState& state, const std::vector<double>& grad,
               const OptimConfig& opt);

struct StepLog {
  int step = 0;
  double loss_rfm = 0.0;
  double loss_sd = 0.0;
};

struct TrainResult {
  ModelParams params;
  std::vector<StepLog> logs;
};

// Draws a training batch: x0 from the prior, x1 from the data, times from
// the capped (s, t) law, interpolant state and velocity per tuple.
std::vector<TrainingTuple> draw_batch(const ManifoldSpec& spec,
                                      const std::vector<ManifoldPoint>& data, int batch,
                                      Rng& rng);

// Self-distillation training loop. Deterministic per (config, seed) when
// cfg.threads == 1. Logs {step, loss_rfm, loss_sd} every cfg.log_every steps.
TrainResult train_model(const ExperimentConfig& cfg, const std::vector<ManifoldPoint>& data,
                        uint64_t seed, std::ostream* log = nullptr);

// write-temp-then-rename
void atomic_write(const std::string& path, const std::string& contents);

}  // namespace gfm
