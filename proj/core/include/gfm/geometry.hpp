#pragma once

// Scalar-generic Riemannian operations for the four supported manifolds.
// Every routine is templated over the scalar type so the same code path
// serves plain evaluation (double), JVPs (Dual<double>), reverse-mode
// training (Var), and reverse-over-forward (Dual<Var>).
//
// Representations:
//   FlatTorus(n)    angles in [0, 2pi), chart coordinates, flat metric
//   Sphere2         unit vectors in R^3, induced metric
//   SO3             row-major 3x3 rotation matrices in R^9,
//                   g(u, v) = tr(u^T v) / 2 so distance(I, R_theta) = theta
//   PoincareBall(n) open unit ball chart, conformal factor 2 / (1 - |x|^2)

#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "gfm/ad.hpp"

namespace gfm {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kBallEps = 1e-5;      // Poincare radius clip 1 - eps
inline constexpr double kCutLocusTol = 1e-6;  // angle-to-pi proximity

enum class ManifoldKind { FlatTorus, Sphere2, SO3, PoincareBall };

struct ManifoldSpec {
  ManifoldKind kind = ManifoldKind::FlatTorus;
  int n = 1;  // chart dimension for FlatTorus / PoincareBall

  int intrinsic_dim() const {
    switch (kind) {
      case ManifoldKind::FlatTorus: return n;
      case ManifoldKind::Sphere2: return 2;
      case ManifoldKind::SO3: return 3;
      case ManifoldKind::PoincareBall: return n;
    }
    return 0;
  }
  int ambient_dim() const {
    switch (kind) {
      case ManifoldKind::FlatTorus: return n;
      case ManifoldKind::Sphere2: return 3;
      case ManifoldKind::SO3: return 9;
      case ManifoldKind::PoincareBall: return n;
    }
    return 0;
  }
  bool is_chart() const {
    return kind == ManifoldKind::FlatTorus || kind == ManifoldKind::PoincareBall;
  }
  bool is_compact() const { return kind != ManifoldKind::PoincareBall; }
  double injectivity_radius() const {
    if (kind == ManifoldKind::PoincareBall) return std::numeric_limits<double>::infinity();
    return kPi;
  }
  std::string name() const;
  static ManifoldSpec parse(const std::string& text);
  bool operator==(const ManifoldSpec& o) const { return kind == o.kind && n == o.n; }
};

struct CutLocusError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace geo {

using ad::acos;
using ad::artanh;
using ad::clamp;
using ad::const_like;
using ad::cos;
using ad::exp;
using ad::log;
using ad::sin;
using ad::sqrt;
using ad::stop_gradient;
using ad::tanh;
using ad::value_of;
using ad::wrap_2pi;
using ad::wrap_pi;
using ad::zero_like;

template <class T>
using Vec = std::vector<T>;

template <class T>
T dot(const Vec<T>& a, const Vec<T>& b) {
  T acc = a[0] * b[0];
  for (size_t i = 1; i < a.size(); ++i) acc = acc + a[i] * b[i];
  return acc;
}

// ---- 3x3 helpers (row-major) ----

template <class T>
Vec<T> mat3_mul(const Vec<T>& a, const Vec<T>& b) {
  Vec<T> c;
  c.reserve(9);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      c.push_back(a[3 * i] * b[j] + a[3 * i + 1] * b[3 + j] + a[3 * i + 2] * b[6 + j]);
  return c;
}

template <class T>
Vec<T> mat3_transpose(const Vec<T>& a) {
  return Vec<T>{a[0], a[3], a[6], a[1], a[4], a[7], a[2], a[5], a[8]};
}

template <class T>
Vec<T> so3_hat(const T& wx, const T& wy, const T& wz) {
  T z = zero_like(wx);
  return Vec<T>{z, -wz, wy, wz, z, -wx, -wy, wx, z};
}

// ---- per-manifold kernels ----

template <class T>
Vec<T> torus_exp(const Vec<T>& x, const Vec<T>& v) {
  Vec<T> r;
  r.reserve(x.size());
  for (size_t i = 0; i < x.size(); ++i) r.push_back(wrap_2pi(x[i] + v[i]));
  return r;
}

template <class T>
Vec<T> torus_log(const Vec<T>& x, const Vec<T>& y) {
  Vec<T> r;
  r.reserve(x.size());
  for (size_t i = 0; i < x.size(); ++i) r.push_back(wrap_pi(y[i] - x[i]));
  return r;
}

template <class T>
Vec<T> sphere_exp(const Vec<T>& x, const Vec<T>& v) {
  T n2 = dot(v, v);
  double nv = std::sqrt(value_of(n2));
  Vec<T> r(3, zero_like(x[0]));
  if (nv < 1e-12) {
    for (int i = 0; i < 3; ++i) r[i] = x[i] + v[i];
  } else {
    T n = sqrt(n2);
    T c = cos(n), sc = sin(n) / n;
    for (int i = 0; i < 3; ++i) r[i] = c * x[i] + sc * v[i];
  }
  // renormalize to keep the unit-sphere invariant exact
  T rn = sqrt(dot(r, r));
  for (int i = 0; i < 3; ++i) r[i] = r[i] / rn;
  return r;
}

template <class T>
Vec<T> sphere_log(const Vec<T>& x, const Vec<T>& y) {
  T c = clamp(dot(x, y), -1.0 + 1e-12, 1.0 - 1e-12);
  if (value_of(c) < -1.0 + kCutLocusTol)
    throw CutLocusError("sphere log: points within cut-locus tolerance of antipodal");
  T theta = acos(c);
  T factor = value_of(theta) < 1e-6 ? 1.0 + theta * theta / 6.0 : theta / sin(theta);
  Vec<T> r;
  r.reserve(3);
  for (int i = 0; i < 3; ++i) r.push_back(factor * (y[i] - c * x[i]));
  return r;
}

// Tangents at x in SO(3) are ambient 9-vectors V with x^T V skew-symmetric.
template <class T>
Vec<T> so3_exp(const Vec<T>& x, const Vec<T>& v) {
  Vec<T> omega = mat3_mul(mat3_transpose(x), v);  // skew body-frame velocity
  T wx = 0.5 * (omega[7] - omega[5]);
  T wy = 0.5 * (omega[2] - omega[6]);
  T wz = 0.5 * (omega[3] - omega[1]);
  T th2 = wx * wx + wy * wy + wz * wz;
  double th = std::sqrt(value_of(th2));
  T a = zero_like(wx), b = zero_like(wx);
  if (th < 1e-4) {
    a = 1.0 - th2 / 6.0;   // sin(t)/t
    b = 0.5 - th2 / 24.0;  // (1-cos(t))/t^2
  } else {
    T t = sqrt(th2);
    a = sin(t) / t;
    b = (1.0 - cos(t)) / th2;
  }
  Vec<T> K = so3_hat(wx, wy, wz);
  Vec<T> K2 = mat3_mul(K, K);
  Vec<T> R(9, zero_like(wx));
  for (int i = 0; i < 9; ++i) R[i] = a * K[i] + b * K2[i];
  R[0] = R[0] + 1.0;
  R[4] = R[4] + 1.0;
  R[8] = R[8] + 1.0;
  return mat3_mul(x, R);
}

template <class T>
Vec<T> so3_log(const Vec<T>& x, const Vec<T>& y) {
  Vec<T> q = mat3_mul(mat3_transpose(x), y);  // relative rotation in the body frame
  T tr = q[0] + q[4] + q[8];
  // angle within kCutLocusTol of pi <=> cosine within tol^2/2 of -1
  if (value_of(0.5 * (tr - 1.0)) < -1.0 + 0.5 * kCutLocusTol * kCutLocusTol)
    throw CutLocusError("so3 log: rotation angle within cut-locus tolerance of pi");
  T c = clamp(0.5 * (tr - 1.0), -1.0 + 1e-12, 1.0 - 1e-12);
  T theta = acos(c);
  T factor = value_of(theta) < 1e-6 ? 0.5 + theta * theta / 12.0 : theta / (2.0 * sin(theta));
  Vec<T> qt = mat3_transpose(q);
  Vec<T> omega(9, zero_like(c));
  for (int i = 0; i < 9; ++i) omega[i] = factor * (q[i] - qt[i]);
  return mat3_mul(x, omega);
}

template <class T>
Vec<T> mobius_add(const Vec<T>& x, const Vec<T>& y) {
  T xy = dot(x, y);
  T x2 = dot(x, x);
  T y2 = dot(y, y);
  T denom = 1.0 + 2.0 * xy + x2 * y2;
  T cx = (1.0 + 2.0 * xy + y2) / denom;
  T cy = (1.0 - x2) / denom;
  Vec<T> r;
  r.reserve(x.size());
  for (size_t i = 0; i < x.size(); ++i) r.push_back(cx * x[i] + cy * y[i]);
  return r;
}

template <class T>
Vec<T> ball_clip(Vec<T> p) {
  T n2 = dot(p, p);
  double nv = std::sqrt(value_of(n2));
  if (nv > 1.0 - kBallEps) {
    T scale = (1.0 - kBallEps) / sqrt(n2);
    for (auto& c : p) c = c * scale;
  }
  return p;
}

template <class T>
Vec<T> ball_exp(const Vec<T>& x, const Vec<T>& v) {
  T n2 = dot(v, v);
  T lam = 2.0 / (1.0 - dot(x, x));
  T scale = zero_like(n2);
  if (std::sqrt(value_of(n2)) < 1e-12) {
    // series of tanh(lam*n/2)/n, exact to first order at n = 0
    scale = 0.5 * lam * (1.0 - (lam * lam / 12.0) * n2);
  } else {
    T n = sqrt(n2);
    scale = tanh(0.5 * lam * n) / n;
  }
  Vec<T> w;
  w.reserve(v.size());
  for (size_t i = 0; i < v.size(); ++i) w.push_back(scale * v[i]);
  return ball_clip(mobius_add(x, w));
}

template <class T>
Vec<T> ball_log(const Vec<T>& x, const Vec<T>& y) {
  Vec<T> mx;
  mx.reserve(x.size());
  for (auto& c : x) mx.push_back(-c);
  Vec<T> u = mobius_add(mx, y);  // (-x) + y in the Mobius gyrogroup
  T n2 = dot(u, u);
  Vec<T> r(x.size(), zero_like(x[0]));
  if (std::sqrt(value_of(n2)) < 1e-15) return r;
  T n = sqrt(clamp(n2, 0.0, 1.0 - 1e-15));
  T lam = 2.0 / (1.0 - dot(x, x));
  T scale = (2.0 / lam) * artanh(n) / n;
  for (size_t i = 0; i < x.size(); ++i) r[i] = scale * u[i];
  return r;
}

// ---- dispatching front ends ----

template <class T>
Vec<T> exp_map(const ManifoldSpec& m, const Vec<T>& x, const Vec<T>& v) {
  switch (m.kind) {
    case ManifoldKind::FlatTorus: return torus_exp(x, v);
    case ManifoldKind::Sphere2: return sphere_exp(x, v);
    case ManifoldKind::SO3: return so3_exp(x, v);
    case ManifoldKind::PoincareBall: return ball_exp(x, v);
  }
  throw std::logic_error("unreachable");
}

template <class T>
Vec<T> log_map(const ManifoldSpec& m, const Vec<T>& x, const Vec<T>& y) {
  switch (m.kind) {
    case ManifoldKind::FlatTorus: return torus_log(x, y);
    case ManifoldKind::Sphere2: return sphere_log(x, y);
    case ManifoldKind::SO3: return so3_log(x, y);
    case ManifoldKind::PoincareBall: return ball_log(x, y);
  }
  throw std::logic_error("unreachable");
}

template <class T>
Vec<T> tangent_project(const ManifoldSpec& m, const Vec<T>& x, const Vec<T>& w) {
  switch (m.kind) {
    case ManifoldKind::FlatTorus:
    case ManifoldKind::PoincareBall:
      return w;  // chart coordinates: identity
    case ManifoldKind::Sphere2: {
      T c = dot(x, w);
      Vec<T> r;
      r.reserve(3);
      for (int i = 0; i < 3; ++i) r.push_back(w[i] - c * x[i]);
      return r;
    }
    case ManifoldKind::SO3: {
      // x * skew-part(x^T w)
      Vec<T> a = mat3_mul(mat3_transpose(x), w);
      Vec<T> at = mat3_transpose(a);
      Vec<T> s(9, zero_like(x[0]));
      for (int i = 0; i < 9; ++i) s[i] = 0.5 * (a[i] - at[i]);
      return mat3_mul(x, s);
    }
  }
  throw std::logic_error("unreachable");
}

template <class T>
T metric_inner(const ManifoldSpec& m, const Vec<T>& x, const Vec<T>& u, const Vec<T>& v) {
  switch (m.kind) {
    case ManifoldKind::FlatTorus:
    case ManifoldKind::Sphere2:
      return dot(u, v);
    case ManifoldKind::SO3:
      return 0.5 * dot(u, v);  // Frobenius / 2, bi-invariant
    case ManifoldKind::PoincareBall: {
      T lam = 2.0 / (1.0 - dot(x, x));
      return lam * lam * dot(u, v);
    }
  }
  throw std::logic_error("unreachable");
}

template <class T>
T metric_norm2(const ManifoldSpec& m, const Vec<T>& x, const Vec<T>& u) {
  return metric_inner(m, x, u, u);
}

// Squared rotation/arc angle from u = 1 - cos(theta), with u computed from
// coordinate differences so the small-angle regime keeps full relative
// precision (the cosine itself saturates at 1 and loses half the digits).
// theta^2 is a smooth function of u near 0; near pi the complementary
// series recovers the angle without the acos conditioning cliff.
template <class T>
T angle2_from_one_minus_cos(const T& u_raw) {
  T u = clamp(u_raw, 0.0, 2.0);
  double uv = value_of(u);
  if (uv < 1e-5) return 2.0 * u + (1.0 / 3.0) * (u * u) + (4.0 / 45.0) * (u * u * u);
  if (uv > 2.0 - 1e-5) {
    T w = clamp(2.0 - u, 0.0, 2.0);
    T phi2 = 2.0 * w + (1.0 / 3.0) * (w * w) + (4.0 / 45.0) * (w * w * w);
    if (value_of(phi2) < 1e-300) return const_like(u, kPi * kPi);
    T th = kPi - sqrt(phi2);
    return th * th;
  }
  T theta = acos(1.0 - u);
  return theta * theta;
}

template <class T>
T distance2(const ManifoldSpec& m, const Vec<T>& x, const Vec<T>& y) {
  switch (m.kind) {
    case ManifoldKind::FlatTorus: {
      T d = wrap_pi(y[0] - x[0]);
      T acc = d * d;
      for (size_t i = 1; i < x.size(); ++i) {
        T di = wrap_pi(y[i] - x[i]);
        acc = acc + di * di;
      }
      return acc;
    }
    case ManifoldKind::Sphere2: {
      Vec<T> d{x[0] - y[0], x[1] - y[1], x[2] - y[2]};
      return angle2_from_one_minus_cos(0.5 * dot(d, d));  // chord: |x-y|^2 = 2(1-cos)
    }
    case ManifoldKind::SO3: {
      Vec<T> d;
      d.reserve(9);
      for (int i = 0; i < 9; ++i) d.push_back(x[i] - y[i]);
      return angle2_from_one_minus_cos(0.25 * dot(d, d));  // |R1-R2|_F^2 = 4(1-cos)
    }
    case ManifoldKind::PoincareBall: {
      Vec<T> mx;
      mx.reserve(x.size());
      for (auto& c : x) mx.push_back(-c);
      Vec<T> u = mobius_add(mx, y);
      T n = sqrt(clamp(dot(u, u), 0.0, 1.0 - 1e-15));
      T d = 2.0 * artanh(n);
      return d * d;
    }
  }
  throw std::logic_error("unreachable");
}

template <class T>
T distance(const ManifoldSpec& m, const Vec<T>& x, const Vec<T>& y) {
  return sqrt(distance2(m, x, y));
}

}  // namespace geo
}  // namespace gfm
