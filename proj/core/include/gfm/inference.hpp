#pragma once

#include <ostream>
#include <vector>

#include "gfm/ad.hpp"
#include "gfm/data.hpp"
#include "gfm/geometry.hpp"
#include "gfm/net.hpp"

namespace gfm {

// Iterates the learned two-time map over a uniform partition of [0,1];
// each step is one network call (NFE = n_steps).
ManifoldPoint sample_few_step(const ModelParams& params, const ManifoldPoint& x0, int n_steps);

// Geodesic forward Euler on the diagonal field v_{t,t}.
ManifoldPoint integrate_flow(const ModelParams& params, const ManifoldPoint& x0, int n_steps);

// Riemannian divergence of an arbitrary velocity field at x.
// FieldFn: (Dual<double> t, vector<Dual<double>> x) -> tangent components.
template <class FieldFn>
double divergence_of(const ManifoldSpec& spec, const FieldFn& field, double t,
                     const std::vector<double>& x);

double riemannian_divergence(const ModelParams& params, double t, const ManifoldPoint& x);

struct LikelihoodResult {
  double log_density = 0.0;
  double prior_log_density = 0.0;
  double div_integral = 0.0;
  ManifoldPoint endpoint;
  int clip_warnings = 0;  // Poincare radius clips along the trajectory
};

LikelihoodResult log_likelihood_detail(const ModelParams& params, const ManifoldPoint& x1,
                                       int n_steps = 100);
double log_likelihood(const ModelParams& params, const ManifoldPoint& x1, int n_steps = 100);

// log-density lattice for 2-dim manifolds; rows `coord1,coord2,log_density`.
// Torus: angle grid; sphere: equirectangular (lon, lat); ball: disk grid.
void write_density_grid(const ModelParams& params, int resolution, int nll_steps,
                        std::ostream& out);

// Quadrature of exp(log_density) over the same lattice (normalization check).
double density_grid_mass(const ModelParams& params, int resolution, int nll_steps);

// ---- implementation ----

template <class FieldFn>
double divergence_of(const ManifoldSpec& spec, const FieldFn& field, double t,
                     const std::vector<double>& x) {
  using ad::Dual;
  using ad::lift;
  using ad::make_dual;
  const size_t d = x.size();
  Dual<double> td = lift(t);

  auto jvp = [&](const std::vector<double>& dir) {
    std::vector<Dual<double>> xd(d);
    for (size_t i = 0; i < d; ++i) xd[i] = make_dual(x[i], dir[i]);
    std::vector<Dual<double>> v = field(td, xd);
    std::vector<double> dv(v.size());
    for (size_t i = 0; i < v.size(); ++i) dv[i] = v[i].d;
    return dv;
  };

  switch (spec.kind) {
    case ManifoldKind::FlatTorus: {
      double div = 0.0;
      std::vector<double> e(d, 0.0);
      for (size_t i = 0; i < d; ++i) {
        e[i] = 1.0;
        div += jvp(e)[i];
        e[i] = 0.0;
      }
      return div;
    }
    case ManifoldKind::Sphere2:
    case ManifoldKind::SO3: {
      ManifoldPoint p{spec, x};
      auto frame = tangent_frame(p);
      double div = 0.0;
      for (const auto& e : frame) {
        auto dv = jvp(e.components);
        div += metric_inner(p, TangentVector{p, dv}, e);
      }
      return div;
    }
    case ManifoldKind::PoincareBall: {
      // conformal chart: div_g v = sum_i dv^i/dx_i + n * lam * <x, v>
      double div = 0.0;
      std::vector<double> e(d, 0.0);
      for (size_t i = 0; i < d; ++i) {
        e[i] = 1.0;
        div += jvp(e)[i];
        e[i] = 0.0;
      }
      std::vector<Dual<double>> xd(d);
      for (size_t i = 0; i < d; ++i) xd[i] = lift(x[i]);
      std::vector<Dual<double>> v = field(td, xd);
      double xv = 0.0;
      for (size_t i = 0; i < d; ++i) xv += x[i] * v[i].v;
      double lam = 2.0 / (1.0 - geo::dot(x, x));
      return div + spec.n * lam * xv;
    }
  }
  throw std::logic_error("unreachable");
}

}  // namespace gfm
