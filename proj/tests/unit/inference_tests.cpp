#include <doctest.h>

#include <cmath>
#include <sstream>

#include "gfm/inference.hpp"
#include "helpers.hpp"

using namespace gfm;

namespace {

ModelParams tiny_random(const ManifoldSpec& m, uint64_t seed, double scale = 0.3) {
  MlpArch a;
  a.hidden = 8;
  a.layers = 2;
  a.time_embed = 4;
  ModelParams p = init_params(m, a, seed);
  Rng rng(Rng::derive(seed, 0xF1));
  for (auto& w : p.values) w = scale * rng.normal();
  return p;
}

}  // namespace

TEST_CASE("zero field: samplers are the identity") {
  Rng rng(61);
  for (const auto& m : testutil::all_manifolds()) {
    MlpArch a;
    a.hidden = 8;
    a.layers = 2;
    a.time_embed = 4;
    ModelParams p = init_params(m, a, 1);  // zero head -> zero field
    ManifoldPoint x = testutil::random_point(m, rng);
    for (int k : {1, 3, 10}) {
      CHECK(geodesic_distance(sample_few_step(p, x, k), x) < 1e-12);
      CHECK(geodesic_distance(integrate_flow(p, x, k), x) < 1e-12);
    }
  }
}

TEST_CASE("one-step sampling equals the direct flow map") {
  Rng rng(62);
  ManifoldSpec m{ManifoldKind::Sphere2, 2};
  ModelParams p = tiny_random(m, 3);
  ManifoldPoint x = testutil::random_point(m, rng);
  ManifoldPoint a = sample_few_step(p, x, 1);
  ManifoldPoint b = flow_map(p, 0.0, 1.0, x);
  CHECK(geodesic_distance(a, b) < 1e-14);
}

TEST_CASE("unit-speed rotation field integrates to arc length one") {
  // v(x) = omega x x with |omega| = 1 is tangent and unit speed; its flow
  // from (1,0,0) is the equator great circle
  ManifoldSpec m{ManifoldKind::Sphere2, 2};
  std::vector<double> x{1.0, 0.0, 0.0};
  int n = 100;
  for (int k = 0; k < n; ++k) {
    std::vector<double> v{-x[1] / n, x[0] / n, 0.0};  // (0,0,1) x x, scaled by h
    x = geo::exp_map(m, x, v);
  }
  ManifoldPoint start{m, {1, 0, 0}};
  ManifoldPoint end{m, x};
  CHECK(geodesic_distance(start, end) == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("integration error halves with the step size") {
  ManifoldSpec m{ManifoldKind::Sphere2, 2};
  ModelParams p = tiny_random(m, 5, 0.8);
  Rng rng(63);
  ManifoldPoint x = testutil::random_point(m, rng);
  ManifoldPoint fine = integrate_flow(p, x, 1600);
  double e1 = geodesic_distance(integrate_flow(p, x, 100), fine);
  double e2 = geodesic_distance(integrate_flow(p, x, 200), fine);
  CHECK(e1 / e2 > 1.5);
  CHECK(e1 / e2 < 2.6);
}

TEST_CASE("coordinate divergence on the torus") {
  ManifoldSpec m{ManifoldKind::FlatTorus, 2};
  auto field = [](auto t, const auto& x) {
    using S = std::decay_t<decltype(t)>;
    return std::vector<S>{sin(x[0]), ad::const_like(t, 0.0)};
  };
  for (double a : {0.3, 1.2, 4.0}) {
    double got = divergence_of(m, field, 0.0, {a, 1.0});
    CHECK(got == doctest::Approx(std::cos(a)).epsilon(1e-10));
  }
}

TEST_CASE("zero field divergence vanishes everywhere") {
  Rng rng(64);
  for (const auto& m : testutil::all_manifolds()) {
    MlpArch a;
    a.hidden = 8;
    a.layers = 2;
    a.time_embed = 4;
    ModelParams p = init_params(m, a, 7);
    ManifoldPoint x = testutil::random_point(m, rng);
    CHECK(riemannian_divergence(p, 0.5, x) == doctest::Approx(0.0));
  }
}

TEST_CASE("sphere divergence matches the flux through a small geodesic circle") {
  // divergence theorem on a geodesic disk of radius r around x:
  // integral of div over the disk = boundary flux; for small r,
  // div(x) ~ flux / area
  ManifoldSpec m{ManifoldKind::Sphere2, 2};
  ModelParams p = tiny_random(m, 11, 0.8);
  auto field = [&](auto t, const auto& x) {
    using S = std::decay_t<decltype(t)>;
    auto raw = detail::mlp_forward<S, double>(m, p.arch, std::span<const double>(p.values), t,
                                              t, x, time_frequencies(p.arch.time_embed));
    return geo::tangent_project(m, x, raw);
  };
  Rng rng(65);
  ManifoldPoint x = testutil::random_point(m, rng);
  double div = divergence_of(m, field, 0.3, x.coords);

  auto frame = tangent_frame(x);
  double r = 1e-3;
  int nseg = 2048;
  double flux = 0.0;
  for (int k = 0; k < nseg; ++k) {
    double phi = 2.0 * kPi * (k + 0.5) / nseg;
    std::vector<double> dir(3), nrm(3);
    for (int i = 0; i < 3; ++i) {
      dir[i] = std::cos(phi) * frame[0].components[i] + std::sin(phi) * frame[1].components[i];
    }
    ManifoldPoint b = exp_map(x, TangentVector{x, {r * dir[0], r * dir[1], r * dir[2]}});
    // outward unit normal at the boundary point: transported radial direction
    TangentVector back = log_map(b, x);
    double nb = std::sqrt(metric_inner(b, back, back));
    for (int i = 0; i < 3; ++i) nrm[i] = -back.components[i] / nb;
    auto v = field(0.3, b.coords);
    double vn = 0.0;
    for (int i = 0; i < 3; ++i) vn += v[i] * nrm[i];
    flux += vn * (2.0 * kPi * std::sin(r) / nseg);  // boundary length element
  }
  double area = 2.0 * kPi * (1.0 - std::cos(r));
  CHECK(testutil::rel_err(flux / area, div) < 1e-2);
}

TEST_CASE("zero-field log likelihood equals the uniform density") {
  Rng rng(66);
  MlpArch a;
  a.hidden = 8;
  a.layers = 2;
  a.time_embed = 4;
  ManifoldSpec sph{ManifoldKind::Sphere2, 2};
  ModelParams ps = init_params(sph, a, 2);
  for (int k = 0; k < 5; ++k) {
    double lp = log_likelihood(ps, testutil::random_point(sph, rng), 100);
    CHECK(lp == doctest::Approx(-std::log(4.0 * kPi)).epsilon(1e-9));
  }
  ManifoldSpec tor{ManifoldKind::FlatTorus, 2};
  ModelParams pt = init_params(tor, a, 2);
  double lp = log_likelihood(pt, testutil::random_point(tor, rng), 100);
  CHECK(lp == doctest::Approx(-std::log(4.0 * kPi * kPi)).epsilon(1e-9));
}

TEST_CASE("model density quadrature-normalizes on the torus") {
  ManifoldSpec m{ManifoldKind::FlatTorus, 2};
  ModelParams p = tiny_random(m, 13, 0.5);
  double mass = density_grid_mass(p, 60, 40);
  CHECK(mass == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("ball prior density quadrature-normalizes on the disk") {
  ManifoldSpec m{ManifoldKind::PoincareBall, 2};
  // riemannian area element lambda^2 dx dy against the wrapped normal
  int res = 400;
  double rmax = 0.9999, h = 2.0 * rmax / res, mass = 0.0;
  for (int i = 0; i < res; ++i)
    for (int j = 0; j < res; ++j) {
      double a = -rmax + (i + 0.5) * h, b = -rmax + (j + 0.5) * h;
      double r2 = a * a + b * b;
      if (r2 >= rmax * rmax) continue;
      double lam = 2.0 / (1.0 - r2);
      mass += std::exp(ball_prior_log_density(m, ManifoldPoint{m, {a, b}})) * lam * lam * h * h;
    }
  CHECK(mass == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("backward-then-forward likelihood trajectory is consistent") {
  ManifoldSpec m{ManifoldKind::Sphere2, 2};
  ModelParams p = tiny_random(m, 17, 0.5);
  Rng rng(67);
  ManifoldPoint x1 = testutil::random_point(m, rng);
  auto run = [&](int n) {
    LikelihoodResult r = log_likelihood_detail(p, x1, n);
    ManifoldPoint fwd = integrate_flow(p, r.endpoint, n);
    return geodesic_distance(fwd, x1);
  };
  double e1 = run(100), e2 = run(200);
  CHECK(e1 < 0.05);
  CHECK(e1 / e2 > 1.5);
}

TEST_CASE("density grid CSV format") {
  ManifoldSpec m{ManifoldKind::FlatTorus, 2};
  MlpArch a;
  a.hidden = 4;
  a.layers = 1;
  a.time_embed = 2;
  ModelParams p = init_params(m, a, 1);
  std::ostringstream out;
  write_density_grid(p, 5, 4, out);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "coord1,coord2,log_density");
  int rows = 0;
  double want = -std::log(4.0 * kPi * kPi);
  while (std::getline(in, line)) {
    ++rows;
    auto last = line.rfind(',');
    CHECK(std::stod(line.substr(last + 1)) == doctest::Approx(want).epsilon(1e-6));
  }
  CHECK(rows == 25);
}
