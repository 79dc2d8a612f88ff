#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "gfm/inference.hpp"

namespace gfm {

struct MMDConfig {
  double bandwidth = 1.0;       // kappa in exp(-kappa * d_g^2)
  size_t max_points = 4096;     // subsample cap for O(n^2) tractability
  uint64_t subsample_seed = 0;
};

// Biased V-statistic with the geodesic RBF kernel (diagonal terms included).
double mmd(const std::vector<ManifoldPoint>& p, const std::vector<ManifoldPoint>& q,
           const MMDConfig& cfg = {});

struct NfeRow {
  int nfe = 0;
  double mmd = 0.0;
};

std::vector<NfeRow> nfe_sweep(const ModelParams& params,
                              const std::vector<ManifoldPoint>& test_set,
                              const std::vector<int>& nfe_list, Rng& rng,
                              const MMDConfig& cfg = {});

struct NllSummary {
  double mean = 0.0;
  double stderr_ = 0.0;
  int clip_warnings = 0;
};

// Mean negative log-likelihood over the test set, with its standard error.
NllSummary test_nll(const ModelParams& params, const std::vector<ManifoldPoint>& test_set,
                    int n_steps = 100);

// Line-delimited records, `key=value` pairs separated by spaces.
void emit_mmd_record(std::ostream& out, const std::string& variant,
                     const ManifoldSpec& manifold, uint64_t seed, int nfe, double value,
                     size_t n_used);
void emit_nll_record(std::ostream& out, const std::string& variant,
                     const ManifoldSpec& manifold, uint64_t seed, const NllSummary& s);

}  // namespace gfm
