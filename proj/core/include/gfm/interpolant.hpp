#pragma once

// Geodesic interpolant I_t(x0, x1) = exp_{x0}(alpha_t log_{x0}(x1)), its
// time derivative, the training time distribution (t ~ U[0,1], s|t ~ U[0,t]),
// and the independent prior-data coupling with cut-locus resampling.

#include <functional>
#include <vector>

#include "gfm/manifold.hpp"
#include "gfm/rng.hpp"

namespace gfm {

struct Schedule {
  // alpha(0) = 0, alpha(1) = 1, monotone. Linear by default.
  std::function<double(double)> alpha = [](double t) { return t; };
  std::function<double(double)> alpha_prime = [](double) { return 1.0; };
};

struct NearSingularError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TrainingTuple {
  double s = 0.0;
  double t = 0.0;
  ManifoldPoint x0, x1;
  ManifoldPoint xs;   // I_s(x0, x1)
  TangentVector us;   // d/ds I_s
};

// t ~ U[0,1], s | t ~ U[0,t]; both clamped to <= 1 - 1e-4 so the
// 1/(1 - alpha) factor in the interpolant velocity stays finite.
std::pair<double, double> sample_times(Rng& rng);

ManifoldPoint interpolate(const ManifoldPoint& x0, const ManifoldPoint& x1, double t,
                          const Schedule& sched = {});

// d/dt I_t = alpha'_t log_{x_t}(x1) / (1 - alpha_t), tangent at I_t.
TangentVector interpolant_velocity(const ManifoldPoint& x0, const ManifoldPoint& x1, double t,
                                   const Schedule& sched = {});

// Independent coupling rho_0 x rho_1; pairs near the cut locus resampled.
std::vector<std::pair<ManifoldPoint, ManifoldPoint>> sample_coupling(
    const std::vector<ManifoldPoint>& dataset,
    const std::function<ManifoldPoint(Rng&)>& prior, Rng& rng, int batch);

TrainingTuple make_training_tuple(const ManifoldPoint& x0, const ManifoldPoint& x1, double s,
                                  double t, const Schedule& sched = {});

}  // namespace gfm
