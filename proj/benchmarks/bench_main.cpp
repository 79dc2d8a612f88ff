// Microbenchmarks for the hot paths: geometry kernels, network evaluation,
// loss gradients, and the MMD estimator.

#include <benchmark/benchmark.h>

#include <vector>

#include "gfm/evaluation.hpp"
#include "gfm/losses.hpp"
#include "gfm/train.hpp"

using namespace gfm;

namespace {

ManifoldSpec spec_for(int idx) {
  switch (idx) {
    case 0: return {ManifoldKind::FlatTorus, 2};
    case 1: return {ManifoldKind::Sphere2, 2};
    case 2: return {ManifoldKind::SO3, 3};
    default: return {ManifoldKind::PoincareBall, 2};
  }
}

ModelParams bench_params(const ManifoldSpec& m, int hidden) {
  MlpArch arch;
  arch.hidden = hidden;
  arch.layers = 2;
  arch.time_embed = 8;
  ModelParams p = init_params(m, arch, 42);
  Rng rng(Rng::derive(42, 0xBE));
  for (auto& w : p.values) w = 0.1 * rng.normal();
  return p;
}

void BM_ExpLogRoundTrip(benchmark::State& state) {
  ManifoldSpec m = spec_for(static_cast<int>(state.range(0)));
  Rng rng(1);
  std::vector<ManifoldPoint> xs, ys;
  for (int i = 0; i < 256; ++i) {
    xs.push_back(sample_uniform(m, rng));
    ys.push_back(sample_uniform(m, rng));
  }
  size_t i = 0;
  for (auto _ : state) {
    const ManifoldPoint& x = xs[i & 255];
    const ManifoldPoint& y = ys[i & 255];
    ++i;
    try {
      benchmark::DoNotOptimize(exp_map(x, log_map(x, y)));
    } catch (const CutLocusError&) {
    }
  }
}
BENCHMARK(BM_ExpLogRoundTrip)->DenseRange(0, 2);

void BM_VelocityEval(benchmark::State& state) {
  ManifoldSpec m{ManifoldKind::FlatTorus, 2};
  ModelParams p = bench_params(m, static_cast<int>(state.range(0)));
  Rng rng(2);
  ManifoldPoint x = sample_uniform(m, rng);
  for (auto _ : state) benchmark::DoNotOptimize(velocity(p, 0.2, 0.7, x));
}
BENCHMARK(BM_VelocityEval)->Arg(32)->Arg(64)->Arg(128);

void BM_LossGradient(benchmark::State& state) {
  ManifoldSpec m{ManifoldKind::FlatTorus, 2};
  ModelParams p = bench_params(m, 32);
  Dataset data = synth_wrapped_mixture(m, 4, 20.0, 1024, 3);
  Rng rng(3);
  auto batch = draw_batch(m, data.points, 64, rng);
  LossConfig cfg;
  cfg.variant = static_cast<LossVariant>(state.range(0));
  std::vector<double> grad;
  for (auto _ : state) benchmark::DoNotOptimize(loss_gradient(p, batch, cfg, grad));
}
BENCHMARK(BM_LossGradient)
    ->Arg(static_cast<int>(LossVariant::RfmOnly))
    ->Arg(static_cast<int>(LossVariant::GLSD))
    ->Arg(static_cast<int>(LossVariant::GESD))
    ->Arg(static_cast<int>(LossVariant::GPSD))
    ->Arg(static_cast<int>(LossVariant::GMF));

void BM_Divergence(benchmark::State& state) {
  ManifoldSpec m = spec_for(static_cast<int>(state.range(0)));
  ModelParams p = bench_params(m, 32);
  Rng rng(4);
  ManifoldPoint x = sample_uniform(m, rng);
  for (auto _ : state) benchmark::DoNotOptimize(riemannian_divergence(p, 0.5, x));
}
BENCHMARK(BM_Divergence)->DenseRange(0, 2);

void BM_Mmd(benchmark::State& state) {
  ManifoldSpec m{ManifoldKind::Sphere2, 2};
  Rng rng(5);
  std::vector<ManifoldPoint> a, b;
  for (int i = 0; i < state.range(0); ++i) {
    a.push_back(sample_uniform(m, rng));
    b.push_back(sample_uniform(m, rng));
  }
  for (auto _ : state) benchmark::DoNotOptimize(mmd(a, b));
}
BENCHMARK(BM_Mmd)->Arg(256)->Arg(1024);

}  // namespace

BENCHMARK_MAIN();
