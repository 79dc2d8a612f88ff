#pragma once

#include <cmath>
#include <vector>

#include "gfm/manifold.hpp"
#include "gfm/rng.hpp"

namespace testutil {

inline std::vector<gfm::ManifoldSpec> all_manifolds() {
  using gfm::ManifoldKind;
  return {
      {ManifoldKind::FlatTorus, 2},
      {ManifoldKind::FlatTorus, 7},
      {ManifoldKind::Sphere2, 2},
      {ManifoldKind::SO3, 3},
      {ManifoldKind::PoincareBall, 2},
      {ManifoldKind::PoincareBall, 3},
  };
}

inline gfm::ManifoldPoint random_point(const gfm::ManifoldSpec& m, gfm::Rng& rng) {
  using gfm::ManifoldKind;
  if (m.kind != ManifoldKind::PoincareBall) return gfm::sample_uniform(m, rng);
  // radius bounded away from the rim keeps numerics honest but testable
  std::vector<double> x(m.n);
  double n2 = 0.0;
  for (auto& c : x) {
    c = rng.normal();
    n2 += c * c;
  }
  double r = 0.85 * std::pow(rng.uniform(), 1.0 / m.n) / std::sqrt(n2);
  for (auto& c : x) c *= r;
  return gfm::ManifoldPoint{m, x};
}

inline gfm::TangentVector random_tangent(const gfm::ManifoldPoint& x, gfm::Rng& rng,
                                         double scale = 1.0) {
  std::vector<double> w(x.coords.size());
  for (auto& c : w) c = scale * rng.normal();
  return gfm::tangent_project(x, w);
}

// central finite difference of a scalar function
template <class F>
double fd(F&& f, double x, double h = 1e-6) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

inline double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(1e-12, std::abs(want));
}

}  // namespace testutil
