#pragma once

// Two-time velocity field v^theta_{s,t}(x): an MLP over
// (features(x), embed(s), embed(t)) with SiLU hidden layers and a
// zero-initialized final layer, whose ambient output is tangent-projected.
// The induced flow map is X_{s,t}(x) = exp_x((t-s) v_{s,t}(x)).

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gfm/ad.hpp"
#include "gfm/manifold.hpp"

namespace gfm {

struct MlpArch {
  int hidden = 64;      // H
  int layers = 3;       // L
  int time_embed = 16;  // E, sinusoidal features per time (must be even)
};

struct CheckpointError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Number of raw input features for x on a manifold: (cos, sin) pairs per
// angle on the torus, ambient coordinates elsewhere.
inline int point_feature_dim(const ManifoldSpec& m) {
  return m.kind == ManifoldKind::FlatTorus ? 2 * m.n : m.ambient_dim();
}

inline int mlp_input_dim(const ManifoldSpec& m, const MlpArch& a) {
  return point_feature_dim(m) + 2 * a.time_embed;
}

// Flat parameter vector: per layer W (rows x cols, row-major) then b.
struct ModelParams {
  ManifoldSpec manifold;
  MlpArch arch;
  std::vector<double> values;

  size_t size() const { return values.size(); }
};

size_t param_count(const ManifoldSpec& m, const MlpArch& a);

// Deterministic init; final layer zeroed so the initial velocity field is 0.
ModelParams init_params(const ManifoldSpec& m, const MlpArch& a, uint64_t seed);

void save_checkpoint(const ModelParams& p, const std::string& path);
ModelParams load_checkpoint(const std::string& path);

// Sinusoidal frequencies, geometric in [1, 1000].
std::vector<double> time_frequencies(int embed);

namespace detail {

template <class T>
void append_time_embedding(std::vector<T>& feats, const T& t, const std::vector<double>& freqs) {
  using ad::cos;
  using ad::sin;
  for (double w : freqs) {
    feats.push_back(sin(w * t));
    feats.push_back(cos(w * t));
  }
}

template <class T>
std::vector<T> point_features(const ManifoldSpec& m, const std::vector<T>& x) {
  using ad::cos;
  using ad::sin;
  if (m.kind != ManifoldKind::FlatTorus) return x;
  std::vector<T> f;
  f.reserve(2 * x.size());
  for (const auto& a : x) {
    f.push_back(cos(a));
    f.push_back(sin(a));
  }
  return f;
}

// Raw MLP output in ambient coordinates (before tangent projection).
// P is the parameter scalar type (double or Var); T the activation type
// (double, Var, Dual<double>, Dual<Var>). Mixed products P * T require T
// constructible from products, so we promote parameters below.
template <class T, class P>
std::vector<T> mlp_forward(const ManifoldSpec& m, const MlpArch& arch, std::span<const P> params,
                           const T& s, const T& t, const std::vector<T>& x,
                           const std::vector<double>& freqs) {
  using ad::sigmoid;
  std::vector<T> h = point_features(m, x);
  h.reserve(mlp_input_dim(m, arch));
  append_time_embedding(h, s, freqs);
  append_time_embedding(h, t, freqs);

  const int D = m.ambient_dim();
  size_t off = 0;
  int in = static_cast<int>(h.size());
  std::vector<T> out;
  for (int layer = 0; layer <= arch.layers; ++layer) {
    const bool last = layer == arch.layers;
    const int rows = last ? D : arch.hidden;
    out.clear();
    out.reserve(rows);
    const P* W = params.data() + off;
    const P* b = params.data() + off + static_cast<size_t>(rows) * in;
    for (int r = 0; r < rows; ++r) {
      T acc = W[static_cast<size_t>(r) * in] * h[0];
      for (int c = 1; c < in; ++c) acc = acc + W[static_cast<size_t>(r) * in + c] * h[c];
      acc = acc + b[r];
      if (!last) acc = acc * sigmoid(acc);  // SiLU
      out.push_back(acc);
    }
    off += static_cast<size_t>(rows) * in + rows;
    h = out;
    in = rows;
  }
  return h;
}

}  // namespace detail

// Double-precision convenience API used by inference and evaluation.
TangentVector velocity(const ModelParams& p, double s, double t, const ManifoldPoint& x);
ManifoldPoint flow_map(const ModelParams& p, double s, double t, const ManifoldPoint& x);

}  // namespace gfm
