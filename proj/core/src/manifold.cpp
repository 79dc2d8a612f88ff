#include "gfm/manifold.hpp"

#include <algorithm>
#include <cmath>

namespace gfm {

std::string ManifoldSpec::name() const {
  switch (kind) {
    case ManifoldKind::FlatTorus: return "flat_torus_" + std::to_string(n);
    case ManifoldKind::Sphere2: return "sphere2";
    case ManifoldKind::SO3: return "so3";
    case ManifoldKind::PoincareBall: return "poincare_ball_" + std::to_string(n);
  }
  return "?";
}

ManifoldSpec ManifoldSpec::parse(const std::string& text) {
  auto starts = [&](const char* p) { return text.rfind(p, 0) == 0; };
  if (starts("flat_torus_"))
    return {ManifoldKind::FlatTorus, std::stoi(text.substr(11))};
  if (text == "flat_torus") return {ManifoldKind::FlatTorus, 2};
  if (text == "sphere2") return {ManifoldKind::Sphere2, 2};
  if (text == "so3") return {ManifoldKind::SO3, 3};
  if (starts("poincare_ball_"))
    return {ManifoldKind::PoincareBall, std::stoi(text.substr(14))};
  if (text == "poincare_ball") return {ManifoldKind::PoincareBall, 2};
  throw ContractError("unknown manifold name: " + text);
}

namespace {

double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double c : v) s += c * c;
  return s;
}

}  // namespace

bool point_ok(const ManifoldPoint& x, double scale) {
  const auto& m = x.manifold;
  if (static_cast<int>(x.coords.size()) != m.ambient_dim()) return false;
  switch (m.kind) {
    case ManifoldKind::FlatTorus:
      return std::all_of(x.coords.begin(), x.coords.end(),
                         [](double a) { return a >= 0.0 && a < 2.0 * kPi; });
    case ManifoldKind::Sphere2:
      return std::abs(std::sqrt(norm2(x.coords)) - 1.0) <= 1e-9 * scale;
    case ManifoldKind::SO3: {
      const auto& r = x.coords;
      auto rt = geo::mat3_transpose(r);
      auto rtr = geo::mat3_mul(rt, r);
      double dev = 0.0;
      for (int i = 0; i < 9; ++i)
        dev = std::max(dev, std::abs(rtr[i] - (i % 4 == 0 ? 1.0 : 0.0)));
      double det = r[0] * (r[4] * r[8] - r[5] * r[7]) - r[1] * (r[3] * r[8] - r[5] * r[6]) +
                   r[2] * (r[3] * r[7] - r[4] * r[6]);
      return dev <= 1e-8 * scale && std::abs(det - 1.0) <= 1e-8 * scale;
    }
    case ManifoldKind::PoincareBall:
      return std::sqrt(norm2(x.coords)) <= 1.0 - kBallEps + 1e-12;
  }
  return false;
}

void check_point(const ManifoldPoint& x) {
  if (!point_ok(x)) throw InvariantError("point violates " + x.manifold.name() + " invariants");
}

bool tangent_ok(const TangentVector& v, double tol_scale) {
  const auto& m = v.base.manifold;
  if (static_cast<int>(v.components.size()) != m.ambient_dim()) return false;
  switch (m.kind) {
    case ManifoldKind::FlatTorus:
    case ManifoldKind::PoincareBall:
      return true;  // chart coordinates, no ambient constraint
    case ManifoldKind::Sphere2: {
      double ip = geo::dot(v.base.coords, v.components);
      return std::abs(ip) <= 1e-9 * tol_scale * std::max(1.0, std::sqrt(norm2(v.components)));
    }
    case ManifoldKind::SO3: {
      auto a = geo::mat3_mul(geo::mat3_transpose(v.base.coords), v.components);
      auto at = geo::mat3_transpose(a);
      double dev = 0.0;
      for (int i = 0; i < 9; ++i) dev = std::max(dev, std::abs(a[i] + at[i]));
      return dev <= 1e-8 * tol_scale * std::max(1.0, std::sqrt(norm2(v.components)));
    }
  }
  return false;
}

void check_tangent(const TangentVector& v) {
  if (!tangent_ok(v))
    throw InvalidTangentError("vector violates tangency invariant on " + v.base.manifold.name());
}

ManifoldPoint exp_map(const ManifoldPoint& x, const TangentVector& v) {
  if (!(v.base.manifold == x.manifold) || v.base.coords != x.coords)
    throw ContractError("exp_map: tangent base does not match point");
  check_tangent(v);
  return {x.manifold, geo::exp_map(x.manifold, x.coords, v.components)};
}

TangentVector log_map(const ManifoldPoint& x, const ManifoldPoint& y) {
  if (!(x.manifold == y.manifold)) throw ContractError("log_map: manifold mismatch");
  return {x, geo::log_map(x.manifold, x.coords, y.coords)};
}

TangentVector tangent_project(const ManifoldPoint& x, const std::vector<double>& w) {
  if (static_cast<int>(w.size()) != x.manifold.ambient_dim())
    throw ContractError("tangent_project: ambient dimension mismatch");
  return {x, geo::tangent_project(x.manifold, x.coords, w)};
}

double metric_inner(const ManifoldPoint& x, const TangentVector& u, const TangentVector& v) {
  if (u.base.coords != x.coords || v.base.coords != x.coords)
    throw ContractError("metric_inner: tangent base mismatch");
  return geo::metric_inner(x.manifold, x.coords, u.components, v.components);
}

double geodesic_distance(const ManifoldPoint& x, const ManifoldPoint& y) {
  if (!(x.manifold == y.manifold)) throw ContractError("geodesic_distance: manifold mismatch");
  return geo::distance(x.manifold, x.coords, y.coords);
}

std::vector<TangentVector> tangent_frame(const ManifoldPoint& x) {
  const auto& m = x.manifold;
  std::vector<TangentVector> frame;
  switch (m.kind) {
    case ManifoldKind::FlatTorus: {
      for (int i = 0; i < m.n; ++i) {
        std::vector<double> e(m.n, 0.0);
        e[i] = 1.0;
        frame.push_back({x, std::move(e)});
      }
      break;
    }
    case ManifoldKind::PoincareBall: {
      double scale = (1.0 - norm2(x.coords)) / 2.0;  // inverse conformal factor
      for (int i = 0; i < m.n; ++i) {
        std::vector<double> e(m.n, 0.0);
        e[i] = scale;
        frame.push_back({x, std::move(e)});
      }
      break;
    }
    case ManifoldKind::Sphere2: {
      // pick the coordinate axis least aligned with x, Gram-Schmidt twice
      const auto& p = x.coords;
      int k = 0;
      for (int i = 1; i < 3; ++i)
        if (std::abs(p[i]) < std::abs(p[k])) k = i;
      std::vector<double> e1(3, 0.0);
      e1[k] = 1.0;
      double c = geo::dot(p, e1);
      for (int i = 0; i < 3; ++i) e1[i] -= c * p[i];
      double n1 = std::sqrt(norm2(e1));
      for (auto& a : e1) a /= n1;
      std::vector<double> e2 = {p[1] * e1[2] - p[2] * e1[1], p[2] * e1[0] - p[0] * e1[2],
                                p[0] * e1[1] - p[1] * e1[0]};
      frame.push_back({x, std::move(e1)});
      frame.push_back({x, std::move(e2)});
      break;
    }
    case ManifoldKind::SO3: {
      // x * K_i with the standard skew generators; g-orthonormal since
      // tr(K_i^T K_j) / 2 = delta_ij.
      for (int i = 0; i < 3; ++i) {
        double w[3] = {0.0, 0.0, 0.0};
        w[i] = 1.0;
        auto K = geo::so3_hat(w[0], w[1], w[2]);
        frame.push_back({x, geo::mat3_mul(x.coords, K)});
      }
      break;
    }
  }
  return frame;
}

ManifoldPoint project_to_manifold(const ManifoldSpec& m, std::vector<double> coords) {
  switch (m.kind) {
    case ManifoldKind::FlatTorus:
      for (auto& a : coords) a = ad::wrap_2pi(a);
      break;
    case ManifoldKind::Sphere2: {
      double n = std::sqrt(norm2(coords));
      for (auto& a : coords) a /= n;
      break;
    }
    case ManifoldKind::SO3: {
      // Newton iteration for the polar factor: R <- 3/2 R - 1/2 R R^T R
      for (int it = 0; it < 8; ++it) {
        auto rtr = geo::mat3_mul(geo::mat3_transpose(coords), coords);
        auto rr = geo::mat3_mul(coords, rtr);
        double dev = 0.0;
        for (int i = 0; i < 9; ++i) {
          double next = 1.5 * coords[i] - 0.5 * rr[i];
          dev = std::max(dev, std::abs(next - coords[i]));
          coords[i] = next;
        }
        if (dev < 1e-15) break;
      }
      break;
    }
    case ManifoldKind::PoincareBall: {
      double n = std::sqrt(norm2(coords));
      if (n > 1.0 - kBallEps)
        for (auto& a : coords) a *= (1.0 - kBallEps) / n;
      break;
    }
  }
  return {m, std::move(coords)};
}

ManifoldPoint sample_uniform(const ManifoldSpec& m, Rng& rng) {
  switch (m.kind) {
    case ManifoldKind::FlatTorus: {
      std::vector<double> c(m.n);
      for (auto& a : c) a = rng.uniform(0.0, 2.0 * kPi);
      return {m, std::move(c)};
    }
    case ManifoldKind::Sphere2: {
      std::vector<double> c(3);
      double n = 0.0;
      do {
        for (auto& a : c) a = rng.normal();
        n = std::sqrt(norm2(c));
      } while (n < 1e-12);
      for (auto& a : c) a /= n;
      return {m, std::move(c)};
    }
    case ManifoldKind::SO3: {
      // Haar via uniform unit quaternion
      double q[4], n = 0.0;
      do {
        n = 0.0;
        for (auto& a : q) {
          a = rng.normal();
          n += a * a;
        }
        n = std::sqrt(n);
      } while (n < 1e-12);
      for (auto& a : q) a /= n;
      double w = q[0], x = q[1], y = q[2], z = q[3];
      std::vector<double> r = {1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
                               2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
                               2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)};
      return {m, std::move(r)};
    }
    case ManifoldKind::PoincareBall:
      throw ContractError("sample_uniform: PoincareBall has no uniform prior; "
                          "use the wrapped-normal prior from data-io");
  }
  throw std::logic_error("unreachable");
}

double manifold_volume(const ManifoldSpec& m) {
  switch (m.kind) {
    case ManifoldKind::FlatTorus: return std::pow(2.0 * kPi, m.n);
    case ManifoldKind::Sphere2: return 4.0 * kPi;
    case ManifoldKind::SO3: return 8.0 * kPi * kPi;  // distance = rotation angle convention
    case ManifoldKind::PoincareBall:
      throw ContractError("manifold_volume: PoincareBall has infinite volume");
  }
  throw std::logic_error("unreachable");
}

}  // namespace gfm
