#pragma once

// Tape-based automatic differentiation over 64-bit scalars.
//
// Two mechanisms compose freely:
//   * reverse mode: record scalar expressions as Var on a Tape, then run
//     Tape::gradient over a scalar result;
//   * forward mode: Dual<T> carries a directional derivative alongside a
//     value, where T is double for plain JVPs or Var when the JVP itself
//     has to be differentiated in reverse (reverse-over-forward).
// Dual tangents built over Var are ordinary tape expressions, so a single
// reverse sweep also differentiates through any embedded JVP.

#include <cassert>
#include <cmath>
#include <type_traits>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace gfm::ad {

struct NumericDomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Node {
  int32_t p0 = -1;
  int32_t p1 = -1;
  double d0 = 0.0;
  double d1 = 0.0;
  double value = 0.0;
};

class Tape;

struct Var {
  Tape* tape = nullptr;
  int32_t idx = -1;
  double value() const;
};

class Tape {
 public:
  void reserve(size_t n) { nodes_.reserve(n); }
  void clear() { nodes_.clear(); }
  size_t size() const { return nodes_.size(); }

  Var leaf(double v) {
    nodes_.push_back(Node{-1, -1, 0.0, 0.0, v});
    return Var{this, static_cast<int32_t>(nodes_.size() - 1)};
  }
  Var constant(double v) { return leaf(v); }

  Var unary(Var a, double da, double v) {
    assert(a.tape == this);
    nodes_.push_back(Node{a.idx, -1, da, 0.0, v});
    return Var{this, static_cast<int32_t>(nodes_.size() - 1)};
  }
  Var binary(Var a, Var b, double da, double db, double v) {
    assert(a.tape == this && b.tape == this);
    nodes_.push_back(Node{a.idx, b.idx, da, db, v});
    return Var{this, static_cast<int32_t>(nodes_.size() - 1)};
  }

  double value(int32_t idx) const { return nodes_[idx].value; }

  // Adjoints of every node with respect to `result`.
  void gradient(Var result, std::vector<double>& adj) const {
    assert(result.tape == this);
    adj.assign(nodes_.size(), 0.0);
    adj[result.idx] = 1.0;
    for (int32_t i = result.idx; i >= 0; --i) {
      const double a = adj[i];
      if (a == 0.0) continue;
      const Node& n = nodes_[i];
      if (n.p0 >= 0) adj[n.p0] += a * n.d0;
      if (n.p1 >= 0) adj[n.p1] += a * n.d1;
    }
  }

 private:
  std::vector<Node> nodes_;
};

inline double Var::value() const { return tape->value(idx); }

// ---- Var primitives ----

inline Var operator+(Var a, Var b) { return a.tape->binary(a, b, 1.0, 1.0, a.value() + b.value()); }
inline Var operator-(Var a, Var b) { return a.tape->binary(a, b, 1.0, -1.0, a.value() - b.value()); }
inline Var operator*(Var a, Var b) { return a.tape->binary(a, b, b.value(), a.value(), a.value() * b.value()); }
inline Var operator/(Var a, Var b) {
  double bv = b.value(), q = a.value() / bv;
  return a.tape->binary(a, b, 1.0 / bv, -q / bv, q);
}
inline Var operator-(Var a) { return a.tape->unary(a, -1.0, -a.value()); }

inline Var operator+(Var a, double c) { return a.tape->unary(a, 1.0, a.value() + c); }
inline Var operator+(double c, Var a) { return a + c; }
inline Var operator-(Var a, double c) { return a + (-c); }
inline Var operator-(double c, Var a) { return a.tape->unary(a, -1.0, c - a.value()); }
inline Var operator*(Var a, double c) { return a.tape->unary(a, c, a.value() * c); }
inline Var operator*(double c, Var a) { return a * c; }
inline Var operator/(Var a, double c) { return a * (1.0 / c); }
inline Var operator/(double c, Var a) {
  double av = a.value();
  return a.tape->unary(a, -c / (av * av), c / av);
}

inline Var sin(Var a) { return a.tape->unary(a, std::cos(a.value()), std::sin(a.value())); }
inline Var cos(Var a) { return a.tape->unary(a, -std::sin(a.value()), std::cos(a.value())); }
inline Var exp(Var a) {
  double e = std::exp(a.value());
  return a.tape->unary(a, e, e);
}
inline Var log(Var a) {
  if (a.value() <= 0.0) throw NumericDomainError("log of non-positive value");
  return a.tape->unary(a, 1.0 / a.value(), std::log(a.value()));
}
inline Var sqrt(Var a) {
  if (a.value() < 0.0) throw NumericDomainError("sqrt of negative value");
  double s = std::sqrt(a.value());
  return a.tape->unary(a, s > 0.0 ? 0.5 / s : 0.0, s);
}
inline Var tanh(Var a) {
  double t = std::tanh(a.value());
  return a.tape->unary(a, 1.0 - t * t, t);
}
inline Var artanh(Var a) {
  double v = a.value();
  if (std::abs(v) >= 1.0) throw NumericDomainError("artanh domain |x| >= 1");
  return a.tape->unary(a, 1.0 / (1.0 - v * v), std::atanh(v));
}
inline Var acos(Var a) {
  double v = a.value();
  if (std::abs(v) >= 1.0) throw NumericDomainError("acos domain |x| >= 1");
  return a.tape->unary(a, -1.0 / std::sqrt(1.0 - v * v), std::acos(v));
}
inline Var sigmoid(Var a) {
  double s = 1.0 / (1.0 + std::exp(-a.value()));
  return a.tape->unary(a, s * (1.0 - s), s);
}
// Clamp with zero derivative outside [lo, hi].
inline Var clamp(Var a, double lo, double hi) {
  double v = a.value();
  if (v < lo) return a.tape->unary(a, 0.0, lo);
  if (v > hi) return a.tape->unary(a, 0.0, hi);
  return a;
}
// Angle wrap to [0, 2pi); derivative 1 (piecewise shift by constants).
inline Var wrap_2pi(Var a) {
  double v = a.value();
  double w = v - 2.0 * std::numbers::pi * std::floor(v / (2.0 * std::numbers::pi));
  if (w >= 2.0 * std::numbers::pi) w = 0.0;
  return a.tape->unary(a, 1.0, w);
}
// Angle wrap to (-pi, pi]; derivative 1.
inline Var wrap_pi(Var a) {
  double v = a.value();
  double w = v - 2.0 * std::numbers::pi * std::floor((v + std::numbers::pi) / (2.0 * std::numbers::pi));
  if (w <= -std::numbers::pi) w = std::numbers::pi;
  return a.tape->unary(a, 1.0, w);
}
inline Var stop_gradient(Var a) { return a.tape->constant(a.value()); }

// ---- double counterparts so templated code runs untaped ----

inline double artanh(double x) {
  if (std::abs(x) >= 1.0) throw NumericDomainError("artanh domain |x| >= 1");
  return std::atanh(x);
}
inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }
inline double clamp(double x, double lo, double hi) { return x < lo ? lo : (x > hi ? hi : x); }
inline double wrap_2pi(double v) {
  double w = v - 2.0 * std::numbers::pi * std::floor(v / (2.0 * std::numbers::pi));
  if (w >= 2.0 * std::numbers::pi) w = 0.0;
  return w;
}
inline double wrap_pi(double v) {
  double w = v - 2.0 * std::numbers::pi * std::floor((v + std::numbers::pi) / (2.0 * std::numbers::pi));
  if (w <= -std::numbers::pi) w = std::numbers::pi;
  return w;
}
inline double stop_gradient(double x) { return x; }

using std::acos;
using std::cos;
using std::exp;
using std::log;
using std::sin;
using std::sqrt;
using std::tanh;

// ---- scalar value extraction ----

inline double value_of(double x) { return x; }
inline double value_of(Var x) { return x.value(); }

inline double zero_like(double) { return 0.0; }
inline Var zero_like(Var x) { return x.tape->constant(0.0); }
inline double const_like(double, double c) { return c; }
inline Var const_like(Var x, double c) { return x.tape->constant(c); }

// ---- forward-mode dual ----

template <class T>
struct Dual {
  T v;  // value
  T d;  // tangent
};

template <class T>
Dual<T> make_dual(T v, T d) {
  return Dual<T>{v, d};
}
template <class T>
Dual<T> lift(T v) {
  return Dual<T>{v, zero_like(v)};
}

template <class T>
double value_of(const Dual<T>& x) {
  return value_of(x.v);
}
template <class T>
Dual<T> zero_like(const Dual<T>& x) {
  return Dual<T>{zero_like(x.v), zero_like(x.v)};
}
template <class T>
Dual<T> const_like(const Dual<T>& x, double c) {
  return Dual<T>{const_like(x.v, c), zero_like(x.v)};
}

template <class T> Dual<T> operator+(const Dual<T>& a, const Dual<T>& b) { return {a.v + b.v, a.d + b.d}; }
template <class T> Dual<T> operator-(const Dual<T>& a, const Dual<T>& b) { return {a.v - b.v, a.d - b.d}; }
template <class T> Dual<T> operator*(const Dual<T>& a, const Dual<T>& b) { return {a.v * b.v, a.v * b.d + a.d * b.v}; }
template <class T> Dual<T> operator/(const Dual<T>& a, const Dual<T>& b) {
  T q = a.v / b.v;
  return {q, (a.d - q * b.d) / b.v};
}
template <class T> Dual<T> operator-(const Dual<T>& a) { return {-a.v, -a.d}; }

template <class T> Dual<T> operator+(const Dual<T>& a, double c) { return {a.v + c, a.d}; }
template <class T> Dual<T> operator+(double c, const Dual<T>& a) { return a + c; }
template <class T> Dual<T> operator-(const Dual<T>& a, double c) { return {a.v - c, a.d}; }
template <class T> Dual<T> operator-(double c, const Dual<T>& a) { return {c - a.v, -a.d}; }
template <class T> Dual<T> operator*(const Dual<T>& a, double c) { return {a.v * c, a.d * c}; }
template <class T> Dual<T> operator*(double c, const Dual<T>& a) { return a * c; }
template <class T> Dual<T> operator/(const Dual<T>& a, double c) { return a * (1.0 / c); }
template <class T> Dual<T> operator/(double c, const Dual<T>& a) {
  T inv = c / a.v;
  return {inv, -(inv / a.v) * a.d};
}

// Mixed scalar (T) and dual operands; the plain scalar carries no tangent.
// Excluded for T = double where the overloads above already apply.
template <class T> requires(!std::is_same_v<T, double>)
Dual<T> operator+(const Dual<T>& a, const T& b) { return {a.v + b, a.d}; }
template <class T> requires(!std::is_same_v<T, double>)
Dual<T> operator+(const T& b, const Dual<T>& a) { return {b + a.v, a.d}; }
template <class T> requires(!std::is_same_v<T, double>)
Dual<T> operator-(const Dual<T>& a, const T& b) { return {a.v - b, a.d}; }
template <class T> requires(!std::is_same_v<T, double>)
Dual<T> operator-(const T& b, const Dual<T>& a) { return {b - a.v, -a.d}; }
template <class T> requires(!std::is_same_v<T, double>)
Dual<T> operator*(const Dual<T>& a, const T& b) { return {a.v * b, a.d * b}; }
template <class T> requires(!std::is_same_v<T, double>)
Dual<T> operator*(const T& b, const Dual<T>& a) { return {b * a.v, b * a.d}; }
template <class T> requires(!std::is_same_v<T, double>)
Dual<T> operator/(const Dual<T>& a, const T& b) { return {a.v / b, a.d / b}; }

template <class T> Dual<T> sin(const Dual<T>& a) { return {sin(a.v), cos(a.v) * a.d}; }
template <class T> Dual<T> cos(const Dual<T>& a) { return {cos(a.v), -(sin(a.v) * a.d)}; }
template <class T> Dual<T> exp(const Dual<T>& a) {
  T e = exp(a.v);
  return {e, e * a.d};
}
template <class T> Dual<T> log(const Dual<T>& a) { return {log(a.v), a.d / a.v}; }
template <class T> Dual<T> sqrt(const Dual<T>& a) {
  T s = sqrt(a.v);
  return {s, a.d / (2.0 * s)};
}
template <class T> Dual<T> tanh(const Dual<T>& a) {
  T t = tanh(a.v);
  return {t, (1.0 - t * t) * a.d};
}
template <class T> Dual<T> artanh(const Dual<T>& a) { return {artanh(a.v), a.d / (1.0 - a.v * a.v)}; }
template <class T> Dual<T> acos(const Dual<T>& a) {
  return {acos(a.v), -(a.d / sqrt(1.0 - a.v * a.v))};
}
template <class T> Dual<T> sigmoid(const Dual<T>& a) {
  T s = sigmoid(a.v);
  return {s, s * (1.0 - s) * a.d};
}
template <class T> Dual<T> clamp(const Dual<T>& a, double lo, double hi) {
  double v = value_of(a.v);
  if (v < lo || v > hi) return {clamp(a.v, lo, hi), zero_like(a.d)};
  return a;
}
template <class T> Dual<T> wrap_2pi(const Dual<T>& a) { return {wrap_2pi(a.v), a.d}; }
template <class T> Dual<T> wrap_pi(const Dual<T>& a) { return {wrap_pi(a.v), a.d}; }
// Stopped subexpressions contribute neither adjoints nor tangents.
template <class T> Dual<T> stop_gradient(const Dual<T>& a) {
  return {stop_gradient(a.v), zero_like(a.d)};
}

}  // namespace gfm::ad
