#include <doctest.h>

#include <cmath>

#include "gfm/interpolant.hpp"
#include "helpers.hpp"

using namespace gfm;

TEST_CASE("interpolant endpoints") {
  Rng rng(41);
  for (const auto& m : testutil::all_manifolds()) {
    ManifoldPoint x0 = testutil::random_point(m, rng);
    ManifoldPoint x1 = testutil::random_point(m, rng);
    try {
      CHECK(geodesic_distance(interpolate(x0, x1, 0.0), x0) < 1e-10);
      CHECK(geodesic_distance(interpolate(x0, x1, 1.0), x1) < 1e-8);
    } catch (const CutLocusError&) {
      continue;
    }
  }
}

TEST_CASE("interpolant follows the geodesic: additive distances") {
  Rng rng(42);
  for (const auto& m : testutil::all_manifolds()) {
    for (int k = 0; k < 30; ++k) {
      ManifoldPoint x0 = testutil::random_point(m, rng);
      ManifoldPoint x1 = testutil::random_point(m, rng);
      double t = rng.uniform(0.1, 0.9);
      try {
        ManifoldPoint xt = interpolate(x0, x1, t);
        double d = geodesic_distance(x0, x1);
        CHECK(geodesic_distance(x0, xt) == doctest::Approx(t * d).epsilon(1e-6));
        CHECK(geodesic_distance(xt, x1) == doctest::Approx((1.0 - t) * d).epsilon(1e-6));
      } catch (const CutLocusError&) {
        continue;
      }
    }
  }
}

TEST_CASE("interpolant velocity matches finite differences of the path") {
  Rng rng(43);
  for (const auto& m : testutil::all_manifolds()) {
    for (int k = 0; k < 10; ++k) {
      ManifoldPoint x0 = testutil::random_point(m, rng);
      ManifoldPoint x1 = testutil::random_point(m, rng);
      double t = rng.uniform(0.2, 0.8);
      try {
        TangentVector u = interpolant_velocity(x0, x1, t);
        double h = 1e-5;
        ManifoldPoint xp = interpolate(x0, x1, t + h);
        ManifoldPoint xm = interpolate(x0, x1, t - h);
        ManifoldPoint xt = interpolate(x0, x1, t);
        // compare in the tangent space at x_t via log
        TangentVector lp = log_map(xt, xp), lm = log_map(xt, xm);
        for (size_t i = 0; i < u.components.size(); ++i) {
          double fd = (lp.components[i] - lm.components[i]) / (2.0 * h);
          CHECK(fd == doctest::Approx(u.components[i]).epsilon(1e-4).scale(1.0));
        }
      } catch (const CutLocusError&) {
        continue;
      }
    }
  }
}

TEST_CASE("velocity magnitude is the geodesic distance under the linear schedule") {
  Rng rng(44);
  ManifoldSpec m{ManifoldKind::Sphere2, 2};
  ManifoldPoint x0 = testutil::random_point(m, rng);
  ManifoldPoint x1 = testutil::random_point(m, rng);
  double d = geodesic_distance(x0, x1);
  for (double t : {0.1, 0.5, 0.8}) {
    TangentVector u = interpolant_velocity(x0, x1, t);
    ManifoldPoint xt = interpolate(x0, x1, t);
    CHECK(std::sqrt(metric_inner(xt, u, u)) == doctest::Approx(d).epsilon(1e-8));
  }
}

TEST_CASE("time sampling respects 0 <= s <= t <= cap") {
  Rng rng(45);
  for (int k = 0; k < 2000; ++k) {
    auto [s, t] = sample_times(rng);
    CHECK(s >= 0.0);
    CHECK(s <= t);
    CHECK(t <= 1.0 - 1e-4);
  }
}

TEST_CASE("near-singular interpolant velocity is rejected") {
  ManifoldSpec m{ManifoldKind::FlatTorus, 2};
  ManifoldPoint x0{m, {0.3, 0.4}}, x1{m, {2.0, 1.0}};
  CHECK_THROWS_AS(interpolant_velocity(x0, x1, 1.0), NearSingularError);
}

TEST_CASE("coupling avoids cut-locus pairs") {
  Rng rng(46);
  ManifoldSpec m{ManifoldKind::Sphere2, 2};
  std::vector<ManifoldPoint> data;
  for (int k = 0; k < 50; ++k) data.push_back(sample_uniform(m, rng));
  auto prior = [&m](Rng& r) { return sample_uniform(m, r); };
  auto pairs = sample_coupling(data, prior, rng, 200);
  REQUIRE(pairs.size() == 200);
  for (const auto& [x0, x1] : pairs) CHECK_NOTHROW(log_map(x0, x1));
}

TEST_CASE("training tuple lies on the interpolant path") {
  Rng rng(47);
  for (const auto& m : testutil::all_manifolds()) {
    ManifoldPoint x0 = testutil::random_point(m, rng);
    ManifoldPoint x1 = testutil::random_point(m, rng);
    try {
      TrainingTuple tup = make_training_tuple(x0, x1, 0.25, 0.75);
      CHECK(point_ok(tup.xs));
      CHECK(tangent_ok(tup.us));
      CHECK(geodesic_distance(tup.xs, interpolate(x0, x1, 0.25)) < 1e-10);
    } catch (const CutLocusError&) {
      continue;
    }
  }
}
