#include "gfm/losses.hpp"

#include <stdexcept>
#include <thread>

namespace gfm {

LossVariant parse_loss_variant(const std::string& name) {
  if (name == "rfm") return LossVariant::RfmOnly;
  if (name == "glsd") return LossVariant::GLSD;
  if (name == "gesd") return LossVariant::GESD;
  if (name == "gpsd") return LossVariant::GPSD;
  if (name == "gmf") return LossVariant::GMF;
  throw std::invalid_argument("unknown loss variant: " + name);
}

std::string loss_variant_name(LossVariant v) {
  switch (v) {
    case LossVariant::RfmOnly: return "rfm";
    case LossVariant::GLSD: return "glsd";
    case LossVariant::GESD: return "gesd";
    case LossVariant::GPSD: return "gpsd";
    case LossVariant::GMF: return "gmf";
  }
  return "?";
}

namespace {

// One sample's contribution: gradient of rfm + w*sd on a fresh tape.
// Returns the two raw loss values; accumulates d(loss)/d(theta) into grad.
std::pair<double, double> sample_grad(const ModelParams& params,
                                      const TrainingTuple& tup, const LossConfig& cfg,
                                      ad::Tape& tape, std::vector<double>& adj,
                                      std::vector<double>& grad) {
  tape.clear();
  MlpField field(params);
  field.bind(tape);
  ad::Var exemplar = tape.constant(0.0);

  ad::Var total = tape.constant(0.0);
  double rfm_v = 0.0, sd_v = 0.0;
  if (cfg.include_fm()) {
    ad::Var r = rfm_term(field, tup, exemplar);
    rfm_v = r.value();
    total = total + r;
  }
  if (cfg.variant != LossVariant::RfmOnly) {
    ad::Var s = sd_term(field, tup, exemplar, cfg);
    sd_v = s.value();
    total = cfg.include_fm() ? total + cfg.sd_weight * s : s;
  }

  tape.gradient(total, adj);
  const size_t p = params.values.size();
  for (size_t i = 0; i < p; ++i) grad[i] += adj[i];
  return {rfm_v, sd_v};
}

}  // namespace

LossBreakdown loss_gradient(const ModelParams& params, const std::vector<TrainingTuple>& batch,
                            const LossConfig& cfg, std::vector<double>& grad, int threads) {
  const size_t p = params.values.size();
  const size_t n = batch.size();
  grad.assign(p, 0.0);
  if (n == 0) return {};

  LossBreakdown out;
  if (threads <= 1) {
    ad::Tape tape;
    std::vector<double> adj;
    for (const auto& tup : batch) {
      auto [r, s] = sample_grad(params, tup, cfg, tape, adj, grad);
      out.rfm += r;
      out.sd += s;
    }
  } else {
    // contiguous chunks, combined in chunk order -> bit-identical for a
    // fixed thread count
    size_t k = std::min<size_t>(threads, n);
    std::vector<std::vector<double>> grads(k, std::vector<double>(p, 0.0));
    std::vector<double> rfms(k, 0.0), sds(k, 0.0);
    std::vector<std::thread> pool;
    for (size_t c = 0; c < k; ++c) {
      pool.emplace_back([&, c] {
        size_t lo = n * c / k, hi = n * (c + 1) / k;
        ad::Tape tape;
        std::vector<double> adj;
        for (size_t i = lo; i < hi; ++i) {
          auto [r, s] = sample_grad(params, batch[i], cfg, tape, adj, grads[c]);
          rfms[c] += r;
          sds[c] += s;
        }
      });
    }
    for (auto& th : pool) th.join();
    for (size_t c = 0; c < k; ++c) {
      out.rfm += rfms[c];
      out.sd += sds[c];
      for (size_t i = 0; i < p; ++i) grad[i] += grads[c][i];
    }
  }

  double inv = 1.0 / static_cast<double>(n);
  for (auto& g : grad) g *= inv;
  out.rfm *= inv;
  out.sd *= inv;
  out.total = cfg.include_fm() ? out.rfm + cfg.sd_weight * out.sd : out.sd;
  return out;
}

}  // namespace gfm
