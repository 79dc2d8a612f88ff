#include "gfm/train.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace gfm {

void adam_step(std::vector<double>& theta, AdamState& state, const std::vector<double>& grad,
               const OptimConfig& opt) {
  ++state.t;
  double c1 = 1.0 - std::pow(opt.beta1, static_cast<double>(state.t));
  double c2 = 1.0 - std::pow(opt.beta2, static_cast<double>(state.t));
  for (size_t i = 0; i < theta.size(); ++i) {
    state.m[i] = opt.beta1 * state.m[i] + (1.0 - opt.beta1) * grad[i];
    state.v[i] = opt.beta2 * state.v[i] + (1.0 - opt.beta2) * grad[i] * grad[i];
    theta[i] -= opt.lr * (state.m[i] / c1) / (std::sqrt(state.v[i] / c2) + 1e-8);
  }
}

std::vector<TrainingTuple> draw_batch(const ManifoldSpec& spec,
                                      const std::vector<ManifoldPoint>& data, int batch,
                                      Rng& rng) {
  auto prior = [&](Rng& r) { return sample_prior(spec, r); };
  auto pairs = sample_coupling(data, prior, rng, batch);
  std::vector<TrainingTuple> tuples;
  tuples.reserve(pairs.size());
  for (const auto& [x0, x1] : pairs) {
    auto [s, t] = sample_times(rng);
    tuples.push_back(make_training_tuple(x0, x1, s, t));
  }
  return tuples;
}

TrainResult train_model(const ExperimentConfig& cfg, const std::vector<ManifoldPoint>& data,
                        uint64_t seed, std::ostream* log) {
  if (data.empty()) throw TrainingError("empty training set");
  TrainResult res{init_params(cfg.manifold, cfg.arch, seed), {}};
  AdamState adam(res.params.values.size());
  Rng rng(Rng::derive(seed, 0x7121));
  std::vector<double> grad;

  for (int step = 0; step < cfg.optim.steps; ++step) {
    auto batch = draw_batch(cfg.manifold, data, cfg.optim.batch, rng);
    LossBreakdown lb = loss_gradient(res.params, batch, cfg.loss, grad, cfg.threads);
    if (!std::isfinite(lb.total))
      throw TrainingError("non-finite loss at step " + std::to_string(step) + " (seed " +
                          std::to_string(seed) + ", rfm=" + std::to_string(lb.rfm) +
                          ", sd=" + std::to_string(lb.sd) + ")");
    adam_step(res.params.values, adam, grad, cfg.optim);
    if (step % cfg.log_every == 0 || step + 1 == cfg.optim.steps) {
      res.logs.push_back({step, lb.rfm, lb.sd});
      if (log) {
        char buf[128];
        std::snprintf(buf, sizeof(buf), "step=%d loss_rfm=%.10g loss_sd=%.10g\n", step, lb.rfm,
                      lb.sd);
        *log << buf << std::flush;
      }
    }
  }
  return res;
}

void atomic_write(const std::string& path, const std::string& contents) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << contents;
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw std::runtime_error("cannot rename " + tmp + " -> " + path);
}

}  // namespace gfm
