#pragma once

// The five training objectives: RFM on the diagonal plus the four
// self-distillation variants (Lagrangian, Eulerian, Progressive, Mean-Flow).
//
// Each per-sample term is a scalar-generic template over (a) the student
// scalar S and (b) a Field providing the velocity network. Teacher terms sit
// under stop-gradient, so they are always evaluated in plain double
// (or Dual<double> for JVP teachers) and enter the student expression as
// constants; the student path runs over S = Var during training and
// S = double when a test evaluates a loss against an analytic field.

#include <cstdint>
#include <vector>

#include "gfm/ad.hpp"
#include "gfm/interpolant.hpp"
#include "gfm/manifold.hpp"
#include "gfm/net.hpp"

namespace gfm {

enum class LossVariant { RfmOnly, GLSD, GESD, GPSD, GMF };

LossVariant parse_loss_variant(const std::string& name);
std::string loss_variant_name(LossVariant v);

struct LossConfig {
  LossVariant variant = LossVariant::RfmOnly;
  double sd_weight = 1.0;
  // Fractional position of the intermediate time u in (s, t) for G-PSD;
  // 0.5 = the two-half-steps shortcut scheme.
  double psd_midpoint = 0.5;

  bool include_fm() const { return variant != LossVariant::GMF; }
};

namespace detail {

template <class S>
struct is_var_based : std::false_type {};
template <>
struct is_var_based<ad::Var> : std::true_type {};
template <>
struct is_var_based<ad::Dual<ad::Var>> : std::true_type {};

template <class S>
std::vector<S> lift_vec(const S& exemplar, const std::vector<double>& v) {
  std::vector<S> r;
  r.reserve(v.size());
  for (double c : v) r.push_back(ad::const_like(exemplar, c));
  return r;
}

template <class S>
std::vector<ad::Dual<S>> lift_dual_vec(const std::vector<S>& v) {
  std::vector<ad::Dual<S>> r;
  r.reserve(v.size());
  for (const auto& c : v) r.push_back(ad::lift(c));
  return r;
}

template <class S>
std::vector<S> value_parts(const std::vector<ad::Dual<S>>& v) {
  std::vector<S> r;
  r.reserve(v.size());
  for (const auto& c : v) r.push_back(c.v);
  return r;
}

template <class S>
std::vector<S> tangent_parts(const std::vector<ad::Dual<S>>& v) {
  std::vector<S> r;
  r.reserve(v.size());
  for (const auto& c : v) r.push_back(c.d);
  return r;
}

inline std::vector<double> doubles_of(const std::vector<double>& v) { return v; }
inline std::vector<double> doubles_of(const std::vector<ad::Var>& v) {
  std::vector<double> r;
  r.reserve(v.size());
  for (auto& c : v) r.push_back(c.value());
  return r;
}

}  // namespace detail

// Velocity field backed by the MLP. Student calls route through tape
// variables when S is Var-based; teacher calls always read raw doubles
// (they model the stop-gradient frozen copy). `teacher_values` normally
// aliases the live parameters; tests may freeze a separate copy.
struct MlpField {
  const ManifoldSpec& manifold;
  const MlpArch& arch;
  const std::vector<double>& student_values;
  const std::vector<double>& teacher_values;
  std::vector<double> freqs;

  ad::Tape* tape = nullptr;
  std::vector<ad::Var> theta;  // bound when training

  MlpField(const ModelParams& p)
      : manifold(p.manifold),
        arch(p.arch),
        student_values(p.values),
        teacher_values(p.values),
        freqs(time_frequencies(p.arch.time_embed)) {}
  MlpField(const ManifoldSpec& m, const MlpArch& a, const std::vector<double>& student,
           const std::vector<double>& teacher)
      : manifold(m), arch(a), student_values(student), teacher_values(teacher),
        freqs(time_frequencies(a.time_embed)) {}

  void bind(ad::Tape& tp) {
    tape = &tp;
    theta.clear();
    theta.reserve(student_values.size());
    for (double v : student_values) theta.push_back(tp.leaf(v));
  }

  template <class S>
  std::vector<S> student(const S& s, const S& t, const std::vector<S>& x) const {
    std::vector<S> raw;
    if constexpr (detail::is_var_based<S>::value) {
      raw = gfm::detail::mlp_forward<S, ad::Var>(manifold, arch, std::span<const ad::Var>(theta),
                                                 s, t, x, freqs);
    } else {
      raw = gfm::detail::mlp_forward<S, double>(
          manifold, arch, std::span<const double>(student_values), s, t, x, freqs);
    }
    return geo::tangent_project(manifold, x, raw);
  }

  template <class S>
  std::vector<S> teacher(const S& s, const S& t, const std::vector<S>& x) const {
    static_assert(!detail::is_var_based<S>::value, "teacher terms are stop-gradded");
    auto raw = gfm::detail::mlp_forward<S, double>(
        manifold, arch, std::span<const double>(teacher_values), s, t, x, freqs);
    return geo::tangent_project(manifold, x, raw);
  }
};

// Closed-form flow field of the one-pair geodesic transport problem with
// the linear schedule: v_{s,t}(x) = log_x(I_t(x0, x1)) / (t - s), whose flow
// map sends every x to I_t exactly. Used as the analytic oracle in tests.
struct AnalyticPairField {
  ManifoldSpec manifold;
  ManifoldPoint x0, x1;
  double perturbation = 0.0;  // additive tangent noise scale

  template <class S>
  std::vector<S> student(const S& s, const S& t, const std::vector<S>& x) const {
    // I_t rebuilt in the active scalar so time derivatives flow through it
    auto x0l = detail::lift_vec(t, x0.coords);
    auto x1l = detail::lift_vec(t, x1.coords);
    std::vector<S> l01 = geo::log_map(manifold, x0l, x1l);
    for (auto& c : l01) c = t * c;
    std::vector<S> xt = geo::exp_map(manifold, x0l, l01);

    double sv = ad::value_of(s), tv = ad::value_of(t);
    std::vector<S> r;
    if (std::abs(tv - sv) < 1e-9) {
      // diagonal limit at a point of the path: d/dt I_t = log_x(x1)/(1 - t)
      std::vector<S> lx1 = geo::log_map(manifold, x, detail::lift_vec(t, x1.coords));
      S scale = 1.0 / (1.0 - ad::clamp(t, 0.0, 1.0 - 1e-6));
      r.reserve(lx1.size());
      for (auto& c : lx1) r.push_back(scale * c);
    } else {
      std::vector<S> l = geo::log_map(manifold, x, xt);
      r.reserve(l.size());
      for (auto& c : l) r.push_back(c / (t - s));
    }
    if (perturbation != 0.0) {
      // deterministic smooth perturbation, tangent-projected
      std::vector<S> w;
      w.reserve(r.size());
      for (size_t i = 0; i < r.size(); ++i)
        w.push_back(ad::const_like(s, perturbation * std::cos(1.7 * (i + 1))));
      auto wp = geo::tangent_project(manifold, x, w);
      for (size_t i = 0; i < r.size(); ++i) r[i] = r[i] + wp[i];
    }
    return r;
  }

  template <class S>
  std::vector<S> teacher(const S& s, const S& t, const std::vector<S>& x) const {
    return student(s, t, x);
  }
};

namespace detail {

// X_{s,t}(x) = exp_x((t-s) v_{s,t}(x)) over any scalar.
template <class S, class Field>
std::vector<S> student_flow(const Field& f, const S& s, const S& t, const std::vector<S>& x) {
  std::vector<S> v = f.student(s, t, x);
  for (auto& c : v) c = (t - s) * c;
  return geo::exp_map(f.manifold, x, v);
}

template <class Field>
std::vector<double> teacher_flow(const Field& f, double s, double t,
                                 const std::vector<double>& x) {
  std::vector<double> v = f.teacher(s, t, x);
  for (auto& c : v) c = (t - s) * c;
  return geo::exp_map(f.manifold, x, v);
}

}  // namespace detail

// ---- per-sample loss terms ----

// || v_{s,s}(x_s) - d/ds I_s ||^2_g at x_s.
template <class S, class Field>
S rfm_term(const Field& f, const TrainingTuple& tup, const S& exemplar) {
  const ManifoldSpec& m = f.manifold;
  S s = ad::const_like(exemplar, tup.s);
  auto xs = detail::lift_vec(exemplar, tup.xs.coords);
  std::vector<S> v = f.student(s, s, xs);
  auto target = detail::lift_vec(exemplar, tup.us.components);
  for (size_t i = 0; i < v.size(); ++i) v[i] = v[i] - target[i];
  return geo::metric_norm2(m, xs, v);
}

// || d/dt X_{s,t}(x_s) - stopgrad(v_{t,t}(X_{s,t}(x_s))) ||^2_g.
template <class S, class Field>
S glsd_term(const Field& f, const TrainingTuple& tup, const S& exemplar) {
  using ad::Dual;
  const ManifoldSpec& m = f.manifold;
  S s = ad::const_like(exemplar, tup.s);
  S t = ad::const_like(exemplar, tup.t);
  auto xs = detail::lift_vec(exemplar, tup.xs.coords);

  Dual<S> sd = ad::lift(s);
  Dual<S> td = ad::make_dual(t, ad::const_like(exemplar, 1.0));
  auto xd = detail::lift_dual_vec(xs);
  std::vector<Dual<S>> v = f.student(sd, td, xd);
  for (auto& c : v) c = (td - sd) * c;
  std::vector<Dual<S>> X = geo::exp_map(m, xd, v);

  std::vector<S> y = detail::value_parts(X);
  std::vector<S> dXdt = detail::tangent_parts(X);

  std::vector<double> y_d = detail::doubles_of(y);
  std::vector<double> teacher = f.teacher(tup.t, tup.t, y_d);

  for (size_t i = 0; i < dXdt.size(); ++i) dXdt[i] = dXdt[i] - teacher[i];
  return geo::metric_norm2(m, y, dXdt);
}

// || d/ds X_{s,t}(x_s) + stopgrad(dX_{s,t}[v_{s,s}(x_s)]) ||^2_g.
template <class S, class Field>
S gesd_term(const Field& f, const TrainingTuple& tup, const S& exemplar) {
  using ad::Dual;
  const ManifoldSpec& m = f.manifold;
  S s = ad::const_like(exemplar, tup.s);
  S t = ad::const_like(exemplar, tup.t);
  auto xs = detail::lift_vec(exemplar, tup.xs.coords);

  // student: partial in s at fixed x
  Dual<S> sd = ad::make_dual(s, ad::const_like(exemplar, 1.0));
  Dual<S> td = ad::lift(t);
  auto xd = detail::lift_dual_vec(xs);
  std::vector<Dual<S>> v = f.student(sd, td, xd);
  for (auto& c : v) c = (td - sd) * c;
  std::vector<Dual<S>> X = geo::exp_map(m, xd, v);
  std::vector<S> y = detail::value_parts(X);
  std::vector<S> dXds = detail::tangent_parts(X);

  // teacher: space-JVP of the flow map along v_{s,s}(x_s), frozen
  std::vector<double> w = f.teacher(tup.s, tup.s, tup.xs.coords);
  std::vector<Dual<double>> xjd;
  xjd.reserve(w.size());
  for (size_t i = 0; i < w.size(); ++i)
    xjd.push_back(ad::make_dual(tup.xs.coords[i], w[i]));
  Dual<double> sj = ad::lift(tup.s), tj = ad::lift(tup.t);
  std::vector<Dual<double>> vj = f.teacher(sj, tj, xjd);
  for (auto& c : vj) c = (tj - sj) * c;
  std::vector<Dual<double>> Xj = geo::exp_map(m, xjd, vj);
  std::vector<double> push = detail::tangent_parts(Xj);

  for (size_t i = 0; i < dXds.size(); ++i) dXds[i] = dXds[i] + push[i];
  return geo::metric_norm2(m, y, dXds);
}

// d_g^2( X_{s,t}(x_s), stopgrad(X_{u,t}(X_{s,u}(x_s))) ), u between s and t.
template <class S, class Field>
S gpsd_term(const Field& f, const TrainingTuple& tup, const S& exemplar, double midpoint) {
  const ManifoldSpec& m = f.manifold;
  S s = ad::const_like(exemplar, tup.s);
  S t = ad::const_like(exemplar, tup.t);
  auto xs = detail::lift_vec(exemplar, tup.xs.coords);

  std::vector<S> v = f.student(s, t, xs);
  for (auto& c : v) c = (t - s) * c;
  std::vector<S> X = geo::exp_map(m, xs, v);

  double u = tup.s + midpoint * (tup.t - tup.s);
  std::vector<double> half = detail::teacher_flow(f, tup.s, u, tup.xs.coords);
  std::vector<double> full = detail::teacher_flow(f, u, tup.t, half);
  auto z = detail::lift_vec(exemplar, full);
  return geo::distance2(m, X, z);
}

// || v_{s,t}(x_s) - stopgrad(u_s - (t-s) * cov_deriv) ||^2_g  with
// cov_deriv the Levi-Civita covariant derivative of v_{s,t} along
// (d/ds, u_s), u_s = d/ds I_s standing in for the ideal flow.
template <class S, class Field>
S gmf_term(const Field& f, const TrainingTuple& tup, const S& exemplar) {
  using ad::Dual;
  const ManifoldSpec& m = f.manifold;
  S s = ad::const_like(exemplar, tup.s);
  S t = ad::const_like(exemplar, tup.t);
  auto xs = detail::lift_vec(exemplar, tup.xs.coords);

  std::vector<S> v = f.student(s, t, xs);

  // teacher JVP jointly in (s, x) along (1, u_s)
  const std::vector<double>& u = tup.us.components;
  std::vector<Dual<double>> xjd;
  xjd.reserve(u.size());
  for (size_t i = 0; i < u.size(); ++i) xjd.push_back(ad::make_dual(tup.xs.coords[i], u[i]));
  Dual<double> sj = ad::make_dual(tup.s, 1.0);
  Dual<double> tj = ad::lift(tup.t);
  std::vector<Dual<double>> wj = f.teacher(sj, tj, xjd);
  std::vector<double> dw = detail::tangent_parts(wj);
  std::vector<double> w = detail::value_parts(wj);

  std::vector<double> cov;
  switch (m.kind) {
    case ManifoldKind::FlatTorus:
      cov = dw;  // flat chart, no correction
      break;
    case ManifoldKind::Sphere2:
    case ManifoldKind::SO3:
      cov = geo::tangent_project(m, tup.xs.coords, dw);  // Gauss formula
      break;
    case ManifoldKind::PoincareBall: {
      // conformal Christoffels: Gamma(u, w)^k =
      //   lam * ( (x.w) u_k + (x.u) w_k - (u.w) x_k )
      const auto& x = tup.xs.coords;
      double lam = 2.0 / (1.0 - geo::dot(x, x));
      double xw = geo::dot(x, w), xu = geo::dot(x, u), uw = geo::dot(u, w);
      cov.resize(x.size());
      for (size_t i = 0; i < x.size(); ++i)
        cov[i] = dw[i] + lam * (xw * u[i] + xu * w[i] - uw * x[i]);
      break;
    }
  }

  std::vector<double> teacher(u.size());
  for (size_t i = 0; i < u.size(); ++i) teacher[i] = u[i] - (tup.t - tup.s) * cov[i];

  for (size_t i = 0; i < v.size(); ++i) v[i] = v[i] - teacher[i];
  return geo::metric_norm2(m, xs, v);
}

template <class S, class Field>
S sd_term(const Field& f, const TrainingTuple& tup, const S& exemplar, const LossConfig& cfg) {
  switch (cfg.variant) {
    case LossVariant::RfmOnly: return ad::const_like(exemplar, 0.0);
    case LossVariant::GLSD: return glsd_term(f, tup, exemplar);
    case LossVariant::GESD: return gesd_term(f, tup, exemplar);
    case LossVariant::GPSD: return gpsd_term(f, tup, exemplar, cfg.psd_midpoint);
    case LossVariant::GMF: return gmf_term(f, tup, exemplar);
  }
  throw std::logic_error("unreachable");
}

// Batch-mean losses in plain double (used by tests and diagnostics).
template <class Field>
double loss_value(const Field& f, const std::vector<TrainingTuple>& batch,
                  const LossConfig& cfg) {
  double rfm = 0.0, sd = 0.0;
  for (const auto& tup : batch) {
    if (cfg.include_fm()) rfm += rfm_term(f, tup, 0.0);
    sd += sd_term(f, tup, 0.0, cfg);
  }
  rfm /= batch.size();
  sd /= batch.size();
  return cfg.include_fm() ? rfm + cfg.sd_weight * sd : sd;
}

struct LossBreakdown {
  double rfm = 0.0;
  double sd = 0.0;
  double total = 0.0;
};

// Batch gradient of the stop-gradded objective with respect to the student
// parameters. Deterministic for a fixed thread count (fixed reduction
// order); `threads` <= 1 runs inline.
LossBreakdown loss_gradient(const ModelParams& params, const std::vector<TrainingTuple>& batch,
                            const LossConfig& cfg, std::vector<double>& grad, int threads = 1);

}  // namespace gfm
