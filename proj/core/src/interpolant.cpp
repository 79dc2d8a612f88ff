#include "gfm/interpolant.hpp"

#include <cmath>

namespace gfm {

namespace {
constexpr double kTimeCap = 1.0 - 1e-4;

bool near_cut_locus(const ManifoldPoint& x0, const ManifoldPoint& x1) {
  switch (x0.manifold.kind) {
    case ManifoldKind::Sphere2: {
      double c = geo::dot(x0.coords, x1.coords);
      return c < -1.0 + 1e-6;
    }
    case ManifoldKind::SO3:
      return geodesic_distance(x0, x1) > kPi - 1e-6;
    default:
      return false;  // torus log is total (wrap), ball has no cut locus
  }
}
}  // namespace

std::pair<double, double> sample_times(Rng& rng) {
  double t = std::min(rng.uniform(), kTimeCap);
  double s = std::min(t * rng.uniform(), kTimeCap);
  return {s, t};
}

ManifoldPoint interpolate(const ManifoldPoint& x0, const ManifoldPoint& x1, double t,
                          const Schedule& sched) {
  TangentVector l = log_map(x0, x1);
  double a = sched.alpha(t);
  for (auto& c : l.components) c *= a;
  return {x0.manifold, geo::exp_map(x0.manifold, x0.coords, l.components)};
}

TangentVector interpolant_velocity(const ManifoldPoint& x0, const ManifoldPoint& x1, double t,
                                   const Schedule& sched) {
  double a = sched.alpha(t);
  if (a >= 1.0 - 1e-6)
    throw NearSingularError("interpolant_velocity: alpha_t within 1e-6 of 1");
  ManifoldPoint xt = interpolate(x0, x1, t, sched);
  TangentVector l = log_map(xt, x1);
  double scale = sched.alpha_prime(t) / (1.0 - a);
  for (auto& c : l.components) c *= scale;
  return l;
}

std::vector<std::pair<ManifoldPoint, ManifoldPoint>> sample_coupling(
    const std::vector<ManifoldPoint>& dataset,
    const std::function<ManifoldPoint(Rng&)>& prior, Rng& rng, int batch) {
  if (batch < 1) throw ContractError("sample_coupling: batch must be >= 1");
  std::vector<std::pair<ManifoldPoint, ManifoldPoint>> pairs;
  pairs.reserve(batch);
  while (static_cast<int>(pairs.size()) < batch) {
    ManifoldPoint x1 = dataset[rng.integer(dataset.size())];
    ManifoldPoint x0 = prior(rng);
    if (near_cut_locus(x0, x1)) continue;  // measure-zero event: resample
    pairs.emplace_back(std::move(x0), std::move(x1));
  }
  return pairs;
}

TrainingTuple make_training_tuple(const ManifoldPoint& x0, const ManifoldPoint& x1, double s,
                                  double t, const Schedule& sched) {
  TrainingTuple tup;
  tup.s = s;
  tup.t = t;
  tup.x0 = x0;
  tup.x1 = x1;
  tup.xs = interpolate(x0, x1, s, sched);
  tup.us = interpolant_velocity(x0, x1, s, sched);
  return tup;
}

}  // namespace gfm
