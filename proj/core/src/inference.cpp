#include "gfm/inference.hpp"

#include <cmath>
#include <cstdio>

namespace gfm {

namespace {

// (t, x) -> v^theta_{t,t}(x), tangent-projected, generic over Dual<double>.
struct DiagonalField {
  const ModelParams& params;
  std::vector<double> freqs;

  explicit DiagonalField(const ModelParams& p)
      : params(p), freqs(time_frequencies(p.arch.time_embed)) {}

  template <class S>
  std::vector<S> operator()(const S& t, const std::vector<S>& x) const {
    auto raw = detail::mlp_forward<S, double>(
        params.manifold, params.arch, std::span<const double>(params.values), t, t, x, freqs);
    return geo::tangent_project(params.manifold, x, raw);
  }
};

}  // namespace

ManifoldPoint sample_few_step(const ModelParams& params, const ManifoldPoint& x0, int n_steps) {
  if (n_steps < 1) throw std::invalid_argument("n_steps >= 1 required");
  ManifoldPoint x = x0;
  for (int k = 0; k < n_steps; ++k) {
    double s = static_cast<double>(k) / n_steps;
    double t = static_cast<double>(k + 1) / n_steps;
    x = flow_map(params, s, t, x);
  }
  return x;
}

ManifoldPoint integrate_flow(const ModelParams& params, const ManifoldPoint& x0, int n_steps) {
  if (n_steps < 1) throw std::invalid_argument("n_steps >= 1 required");
  DiagonalField field(params);
  double h = 1.0 / n_steps;
  ManifoldPoint x = x0;
  for (int k = 0; k < n_steps; ++k) {
    double t = static_cast<double>(k) / n_steps;
    std::vector<double> v = field(t, x.coords);
    for (auto& c : v) c *= h;
    x = exp_map(x, TangentVector{x, v});
  }
  return x;
}

double riemannian_divergence(const ModelParams& params, double t, const ManifoldPoint& x) {
  DiagonalField field(params);
  return divergence_of(params.manifold, field, t, x.coords);
}

LikelihoodResult log_likelihood_detail(const ModelParams& params, const ManifoldPoint& x1,
                                       int n_steps) {
  if (n_steps < 1) throw std::invalid_argument("n_steps >= 1 required");
  const ManifoldSpec& m = params.manifold;
  DiagonalField field(params);
  double h = 1.0 / n_steps;
  LikelihoodResult res;
  res.endpoint = x1;
  ManifoldPoint x = x1;
  // trapezoidal accumulation of the divergence along the backward Euler
  // path: the endpoint divergence of one step is reused as the start of
  // the next, so accuracy improves at no extra field evaluations.
  double div_prev = divergence_of(m, field, 1.0, x.coords);
  for (int k = n_steps; k > 0; --k) {
    std::vector<double> v = field(static_cast<double>(k) / n_steps, x.coords);
    for (auto& c : v) c *= -h;
    x = exp_map(x, TangentVector{x, v});
    if (m.kind == ManifoldKind::PoincareBall) {
      double r = std::sqrt(geo::dot(x.coords, x.coords));
      if (r >= 1.0 - kBallEps - 1e-12) ++res.clip_warnings;
    }
    double div_here = divergence_of(m, field, static_cast<double>(k - 1) / n_steps, x.coords);
    res.div_integral += 0.5 * h * (div_prev + div_here);
    div_prev = div_here;
  }
  res.endpoint = x;
  res.prior_log_density = prior_log_density(m, x);
  res.log_density = res.prior_log_density - res.div_integral;
  return res;
}

double log_likelihood(const ModelParams& params, const ManifoldPoint& x1, int n_steps) {
  return log_likelihood_detail(params, x1, n_steps).log_density;
}

namespace {

struct GridCell {
  double c1, c2;        // native coordinates written to the CSV
  std::vector<double> point;  // manifold coordinates
  double area;          // riemannian cell area
};

std::vector<GridCell> density_lattice(const ManifoldSpec& m, int res) {
  std::vector<GridCell> cells;
  switch (m.kind) {
    case ManifoldKind::FlatTorus: {
      if (m.n != 2) throw std::invalid_argument("density grid needs a 2-dim manifold");
      double h = 2.0 * kPi / res;
      for (int i = 0; i < res; ++i)
        for (int j = 0; j < res; ++j) {
          double a = (i + 0.5) * h, b = (j + 0.5) * h;
          cells.push_back({a, b, {a, b}, h * h});
        }
      return cells;
    }
    case ManifoldKind::Sphere2: {
      double hl = 2.0 * kPi / res, hp = kPi / res;
      for (int i = 0; i < res; ++i)
        for (int j = 0; j < res; ++j) {
          double lon = -kPi + (i + 0.5) * hl;
          double lat = -0.5 * kPi + (j + 0.5) * hp;
          cells.push_back({lon, lat,
                           {std::cos(lat) * std::cos(lon), std::cos(lat) * std::sin(lon),
                            std::sin(lat)},
                           std::cos(lat) * hl * hp});
        }
      return cells;
    }
    case ManifoldKind::PoincareBall: {
      if (m.n != 2) throw std::invalid_argument("density grid needs a 2-dim manifold");
      double rmax = 0.999, h = 2.0 * rmax / res;
      for (int i = 0; i < res; ++i)
        for (int j = 0; j < res; ++j) {
          double a = -rmax + (i + 0.5) * h, b = -rmax + (j + 0.5) * h;
          if (a * a + b * b >= rmax * rmax) continue;
          double lam = 2.0 / (1.0 - a * a - b * b);
          cells.push_back({a, b, {a, b}, lam * lam * h * h});
        }
      return cells;
    }
    case ManifoldKind::SO3:
      throw std::invalid_argument("density grid needs a 2-dim manifold");
  }
  throw std::logic_error("unreachable");
}

}  // namespace

void write_density_grid(const ModelParams& params, int resolution, int nll_steps,
                        std::ostream& out) {
  out << "coord1,coord2,log_density\n";
  char buf[160];
  for (const auto& cell : density_lattice(params.manifold, resolution)) {
    double lp = log_likelihood(params, ManifoldPoint{params.manifold, cell.point}, nll_steps);
    std::snprintf(buf, sizeof(buf), "%.10g,%.10g,%.10g\n", cell.c1, cell.c2, lp);
    out << buf;
  }
}

double density_grid_mass(const ModelParams& params, int resolution, int nll_steps) {
  double mass = 0.0;
  for (const auto& cell : density_lattice(params.manifold, resolution)) {
    double lp = log_likelihood(params, ManifoldPoint{params.manifold, cell.point}, nll_steps);
    mass += std::exp(lp) * cell.area;
  }
  return mass;
}

}  // namespace gfm
