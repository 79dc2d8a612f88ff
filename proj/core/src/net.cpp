#include "gfm/net.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace gfm {

std::vector<double> time_frequencies(int embed) {
  const int k = embed / 2;
  std::vector<double> freqs(k);
  for (int i = 0; i < k; ++i)
    freqs[i] = k == 1 ? 1.0 : std::pow(1000.0, static_cast<double>(i) / (k - 1));
  return freqs;
}

size_t param_count(const ManifoldSpec& m, const MlpArch& a) {
  size_t total = 0;
  int in = mlp_input_dim(m, a);
  for (int layer = 0; layer <= a.layers; ++layer) {
    const int rows = layer == a.layers ? m.ambient_dim() : a.hidden;
    total += static_cast<size_t>(rows) * in + rows;
    in = rows;
  }
  return total;
}

ModelParams init_params(const ManifoldSpec& m, const MlpArch& a, uint64_t seed) {
  if (a.hidden < 1 || a.layers < 1 || a.time_embed < 1 || a.time_embed % 2 != 0)
    throw ContractError("init_params: invalid architecture");
  ModelParams p{m, a, std::vector<double>(param_count(m, a), 0.0)};
  Rng rng(Rng::derive(seed, 0xA11C));
  size_t off = 0;
  int in = mlp_input_dim(m, a);
  for (int layer = 0; layer <= a.layers; ++layer) {
    const bool last = layer == a.layers;
    const int rows = last ? m.ambient_dim() : a.hidden;
    const double scale = std::sqrt(2.0 / in);
    if (!last)
      for (size_t i = 0; i < static_cast<size_t>(rows) * in; ++i)
        p.values[off + i] = scale * rng.normal();
    // biases (and the whole final layer) stay zero
    off += static_cast<size_t>(rows) * in + rows;
    in = rows;
  }
  return p;
}

void save_checkpoint(const ModelParams& p, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw CheckpointError("cannot open checkpoint for writing: " + path);
  out << "gfm-checkpoint v1\n";
  out << "manifold " << p.manifold.name() << "\n";
  out << "arch " << p.arch.hidden << " " << p.arch.layers << " " << p.arch.time_embed << "\n";
  out << "values " << p.values.size() << "\n";
  char buf[40];
  for (double v : p.values) {
    std::snprintf(buf, sizeof buf, "%.17g\n", v);
    out << buf;
  }
  if (!out) throw CheckpointError("checkpoint write failed: " + path);
}

ModelParams load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CheckpointError("cannot open checkpoint: " + path);
  std::string magic, version;
  in >> magic >> version;
  if (magic != "gfm-checkpoint" || version != "v1")
    throw CheckpointError("unrecognized checkpoint header in " + path);
  std::string key, mname;
  in >> key >> mname;
  if (key != "manifold") throw CheckpointError("malformed checkpoint: " + path);
  ModelParams p;
  p.manifold = ManifoldSpec::parse(mname);
  in >> key >> p.arch.hidden >> p.arch.layers >> p.arch.time_embed;
  if (key != "arch") throw CheckpointError("malformed checkpoint: " + path);
  size_t count = 0;
  in >> key >> count;
  if (key != "values") throw CheckpointError("malformed checkpoint: " + path);
  if (count != param_count(p.manifold, p.arch))
    throw CheckpointError("checkpoint parameter count does not match architecture");
  p.values.resize(count);
  for (auto& v : p.values)
    if (!(in >> v)) throw CheckpointError("truncated checkpoint: " + path);
  return p;
}

TangentVector velocity(const ModelParams& p, double s, double t, const ManifoldPoint& x) {
  if (!(x.manifold == p.manifold)) throw ContractError("velocity: manifold mismatch");
  auto freqs = time_frequencies(p.arch.time_embed);
  auto raw = detail::mlp_forward<double, double>(p.manifold, p.arch,
                                                 std::span<const double>(p.values), s, t,
                                                 x.coords, freqs);
  return {x, geo::tangent_project(p.manifold, x.coords, raw)};
}

ManifoldPoint flow_map(const ModelParams& p, double s, double t, const ManifoldPoint& x) {
  if (s == t) return x;
  TangentVector v = velocity(p, s, t, x);
  for (auto& c : v.components) c *= t - s;
  return {x.manifold, geo::exp_map(p.manifold, x.coords, v.components)};
}

}  // namespace gfm
