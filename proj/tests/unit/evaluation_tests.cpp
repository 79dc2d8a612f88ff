#include <doctest.h>

#include <cmath>
#include <sstream>

#include "gfm/evaluation.hpp"
#include "helpers.hpp"

using namespace gfm;

TEST_CASE("mmd of identical lists is zero") {
  Rng rng(71);
  ManifoldSpec m{ManifoldKind::Sphere2, 2};
  std::vector<ManifoldPoint> p;
  for (int k = 0; k < 64; ++k) p.push_back(sample_uniform(m, rng));
  CHECK(std::abs(mmd(p, p)) < 1e-12);
}

TEST_CASE("antipodal singletons: closed-form value") {
  ManifoldSpec m{ManifoldKind::Sphere2, 2};
  std::vector<ManifoldPoint> p{ManifoldPoint{m, {0, 0, 1}}};
  std::vector<ManifoldPoint> q{ManifoldPoint{m, {0, 0, -1}}};
  double want = 2.0 - 2.0 * std::exp(-kPi * kPi);
  CHECK(mmd(p, q) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("mmd is symmetric and nonnegative") {
  Rng rng(72);
  for (const auto& m : testutil::all_manifolds()) {
    std::vector<ManifoldPoint> p, q;
    for (int k = 0; k < 40; ++k) {
      p.push_back(testutil::random_point(m, rng));
      q.push_back(testutil::random_point(m, rng));
    }
    double pq = mmd(p, q), qp = mmd(q, p);
    CHECK(std::abs(pq - qp) < 1e-12);
    CHECK(pq >= -1e-12);
  }
}

TEST_CASE("bandwidth default and override") {
  ManifoldSpec m{ManifoldKind::Sphere2, 2};
  std::vector<ManifoldPoint> p{ManifoldPoint{m, {1, 0, 0}}};
  std::vector<ManifoldPoint> q{ManifoldPoint{m, {0, 1, 0}}};
  double d2 = (kPi / 2) * (kPi / 2);
  MMDConfig dflt;
  CHECK(dflt.bandwidth == 1.0);
  CHECK(mmd(p, q, dflt) == doctest::Approx(2.0 - 2.0 * std::exp(-d2)).epsilon(1e-12));
  MMDConfig half;
  half.bandwidth = 0.5;
  CHECK(mmd(p, q, half) == doctest::Approx(2.0 - 2.0 * std::exp(-0.5 * d2)).epsilon(1e-12));
}

TEST_CASE("mismatched lengths are rejected") {
  ManifoldSpec m{ManifoldKind::FlatTorus, 2};
  std::vector<ManifoldPoint> p{ManifoldPoint{m, {0, 0}}};
  std::vector<ManifoldPoint> q{ManifoldPoint{m, {0, 0}}, ManifoldPoint{m, {1, 1}}};
  CHECK_THROWS_AS(mmd(p, q), ContractError);
}

TEST_CASE("mmd shrinks for larger same-distribution samples") {
  Rng rng(73);
  ManifoldSpec m{ManifoldKind::FlatTorus, 2};
  auto draw = [&](int n) {
    std::vector<ManifoldPoint> out;
    for (int k = 0; k < n; ++k) out.push_back(sample_uniform(m, rng));
    return out;
  };
  double small = mmd(draw(50), draw(50));
  double big = mmd(draw(500), draw(500));
  CHECK(big < small);
}

TEST_CASE("subsampling caps the kernel matrix deterministically") {
  Rng rng(74);
  ManifoldSpec m{ManifoldKind::Sphere2, 2};
  std::vector<ManifoldPoint> p, q;
  for (int k = 0; k < 300; ++k) {
    p.push_back(sample_uniform(m, rng));
    q.push_back(sample_uniform(m, rng));
  }
  MMDConfig cfg;
  cfg.max_points = 128;
  cfg.subsample_seed = 9;
  double a = mmd(p, q, cfg), b = mmd(p, q, cfg);
  CHECK(a == b);
}

TEST_CASE("zero field on the sphere: uniform prior matches uniform data") {
  Rng rng(75);
  ManifoldSpec m{ManifoldKind::Sphere2, 2};
  MlpArch a;
  a.hidden = 8;
  a.layers = 2;
  a.time_embed = 4;
  ModelParams params = init_params(m, a, 3);
  std::vector<ManifoldPoint> test;
  for (int k = 0; k < 400; ++k) test.push_back(sample_uniform(m, rng));
  Rng sweep_rng(5);
  auto rows = nfe_sweep(params, test, {1, 4}, sweep_rng);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].nfe == 1);
  CHECK(rows[1].nfe == 4);
  for (const auto& r : rows) CHECK(r.mmd < 0.05);
}

TEST_CASE("nfe sweep is deterministic per seed") {
  Rng rng(76);
  ManifoldSpec m{ManifoldKind::FlatTorus, 2};
  MlpArch a;
  a.hidden = 8;
  a.layers = 2;
  a.time_embed = 4;
  ModelParams params = init_params(m, a, 4);
  Rng r1(Rng::derive(7, 1)), r2(Rng::derive(7, 1));
  std::vector<ManifoldPoint> test;
  for (int k = 0; k < 100; ++k) test.push_back(sample_uniform(m, rng));
  auto a1 = nfe_sweep(params, test, {1, 2}, r1);
  auto a2 = nfe_sweep(params, test, {1, 2}, r2);
  for (size_t i = 0; i < a1.size(); ++i) CHECK(a1[i].mmd == a2[i].mmd);
}

TEST_CASE("test_nll on the zero field reports the uniform constants") {
  MlpArch a;
  a.hidden = 8;
  a.layers = 2;
  a.time_embed = 4;
  Rng rng(77);
  ManifoldSpec sph{ManifoldKind::Sphere2, 2};
  std::vector<ManifoldPoint> pts;
  for (int k = 0; k < 20; ++k) pts.push_back(sample_uniform(sph, rng));
  NllSummary s = test_nll(init_params(sph, a, 5), pts, 50);
  CHECK(s.mean == doctest::Approx(std::log(4.0 * kPi)).epsilon(1e-9));
  CHECK(s.stderr_ < 1e-9);
}

TEST_CASE("metric records are line-delimited key=value") {
  std::ostringstream out;
  ManifoldSpec m{ManifoldKind::SO3, 3};
  emit_mmd_record(out, "glsd", m, 3, 10, 0.125, 1000);
  NllSummary s;
  s.mean = 2.5;
  s.stderr_ = 0.01;
  emit_nll_record(out, "glsd", m, 3, s);
  CHECK(out.str() ==
        "variant=glsd manifold=so3 seed=3 nfe=10 mmd=0.125 n=1000\n"
        "variant=glsd manifold=so3 seed=3 nll_mean=2.5 nll_stderr=0.01\n");
}
