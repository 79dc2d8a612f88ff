#include "gfm/evaluation.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>

namespace gfm {

namespace {

std::vector<ManifoldPoint> subsample(const std::vector<ManifoldPoint>& pts, size_t cap,
                                     uint64_t seed) {
  if (pts.size() <= cap) return pts;
  std::vector<size_t> idx(pts.size());
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(Rng::derive(seed, 0x55));
  for (size_t i = idx.size() - 1; i > 0; --i) std::swap(idx[i], idx[rng.integer(i + 1)]);
  std::vector<ManifoldPoint> out;
  out.reserve(cap);
  for (size_t k = 0; k < cap; ++k) out.push_back(pts[idx[k]]);
  return out;
}

}  // namespace

double mmd(const std::vector<ManifoldPoint>& p_in, const std::vector<ManifoldPoint>& q_in,
           const MMDConfig& cfg) {
  if (p_in.size() != q_in.size())
    throw ContractError("mmd: sample lists must have equal length");
  if (p_in.empty()) throw ContractError("mmd: empty sample lists");
  auto p = subsample(p_in, cfg.max_points, cfg.subsample_seed);
  auto q = subsample(q_in, cfg.max_points, cfg.subsample_seed + 1);
  const size_t n = p.size();
  const double kappa = cfg.bandwidth;
  auto k = [&](const ManifoldPoint& a, const ManifoldPoint& b) {
    double d = geodesic_distance(a, b);
    return std::exp(-kappa * d * d);
  };
  double acc = 0.0;
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) acc += k(p[i], p[j]) + k(q[i], q[j]) - 2.0 * k(p[i], q[j]);
  return acc / static_cast<double>(n * n);
}

std::vector<NfeRow> nfe_sweep(const ModelParams& params,
                              const std::vector<ManifoldPoint>& test_set,
                              const std::vector<int>& nfe_list, Rng& rng,
                              const MMDConfig& cfg) {
  if (nfe_list.empty()) throw ContractError("nfe_sweep: empty nfe list");
  std::vector<NfeRow> rows;
  for (int nfe : nfe_list) {
    std::vector<ManifoldPoint> samples;
    samples.reserve(test_set.size());
    for (size_t i = 0; i < test_set.size(); ++i)
      samples.push_back(sample_few_step(params, sample_prior(params.manifold, rng), nfe));
    rows.push_back({nfe, mmd(samples, test_set, cfg)});
  }
  return rows;
}

NllSummary test_nll(const ModelParams& params, const std::vector<ManifoldPoint>& test_set,
                    int n_steps) {
  if (test_set.empty()) throw ContractError("test_nll: empty test set");
  NllSummary s;
  double sum = 0.0, sum2 = 0.0;
  for (const auto& x : test_set) {
    auto r = log_likelihood_detail(params, x, n_steps);
    double nll = -r.log_density;
    sum += nll;
    sum2 += nll * nll;
    if (r.clip_warnings > 10) ++s.clip_warnings;
  }
  double n = static_cast<double>(test_set.size());
  s.mean = sum / n;
  double var = std::max(0.0, sum2 / n - s.mean * s.mean);
  s.stderr_ = n > 1 ? std::sqrt(var / (n - 1)) : 0.0;
  return s;
}

void emit_mmd_record(std::ostream& out, const std::string& variant,
                     const ManifoldSpec& manifold, uint64_t seed, int nfe, double value,
                     size_t n_used) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", value);
  out << "variant=" << variant << " manifold=" << manifold.name() << " seed=" << seed
      << " nfe=" << nfe << " mmd=" << buf << " n=" << n_used << "\n";
}

void emit_nll_record(std::ostream& out, const std::string& variant,
                     const ManifoldSpec& manifold, uint64_t seed, const NllSummary& s) {
  char b1[64], b2[64];
  std::snprintf(b1, sizeof(b1), "%.10g", s.mean);
  std::snprintf(b2, sizeof(b2), "%.10g", s.stderr_);
  out << "variant=" << variant << " manifold=" << manifold.name() << " seed=" << seed
      << " nll_mean=" << b1 << " nll_stderr=" << b2 << "\n";
}

}  // namespace gfm
