#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <utility>

#include "gfm/data.hpp"
#include "gfm/geometry.hpp"
#include "helpers.hpp"

using namespace gfm;

namespace {

std::string write_temp(const std::string& name, const std::string& body) {
  std::string path = (std::filesystem::temp_directory_path() / name).string();
  std::ofstream out(path);
  out << body;
  return path;
}

}  // namespace

TEST_CASE("geodata loader maps lat/lon to unit vectors") {
  std::string path = write_temp("geo_ok.csv",
                                "lat,lon\n"
                                "90,12\n"
                                "0,0\n"
                                "0,90\n"
                                "-45,180\n");
  Dataset ds = load_geodata_csv(path);
  REQUIRE(ds.points.size() == 4);
  CHECK(ds.points[0].coords[2] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ds.points[1].coords[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ds.points[2].coords[1] == doctest::Approx(1.0).epsilon(1e-12));
  for (const auto& p : ds.points) CHECK(point_ok(p));
  std::remove(path.c_str());
}

TEST_CASE("geodata loader rejects out-of-range rows with the line number") {
  std::string path = write_temp("geo_bad.csv", "lat,lon\n10,20\n95,0\n");
  try {
    load_geodata_csv(path);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  std::remove(path.c_str());
}

TEST_CASE("angle loader wraps into [0, 2pi)") {
  std::string path = write_temp("ang.csv", "-1.5707963267948966,3.141592653589793\n0,0\n");
  Dataset ds = load_angles_csv(path, 2);
  REQUIRE(ds.points.size() == 2);
  CHECK(ds.points[0].coords[0] == doctest::Approx(3.0 * kPi / 2).epsilon(1e-12));
  CHECK(ds.points[0].coords[1] == doctest::Approx(kPi).epsilon(1e-12));
  CHECK(ds.points[1].coords[0] == 0.0);
  std::remove(path.c_str());
}

TEST_CASE("angle loader enforces the column count") {
  std::string path = write_temp("ang_bad.csv", "0.1,0.2\n0.3\n");
  CHECK_THROWS_AS(load_angles_csv(path, 2), ParseError);
  std::remove(path.c_str());
}

TEST_CASE("dataset csv round trip is bit exact on chart manifolds") {
  Dataset ds = synth_wrapped_mixture({ManifoldKind::FlatTorus, 2}, 3, 15.0, 50, 4);
  std::string path =
      (std::filesystem::temp_directory_path() / "roundtrip_torus.csv").string();
  write_dataset_csv(ds, path);
  Dataset back = load_angles_csv(path, 2);
  REQUIRE(back.points.size() == ds.points.size());
  for (size_t i = 0; i < ds.points.size(); ++i)
    for (int j = 0; j < 2; ++j) CHECK(back.points[i].coords[j] == ds.points[i].coords[j]);
  std::remove(path.c_str());
}

TEST_CASE("synthetic mixtures are deterministic and land on the manifold") {
  for (const auto& m : testutil::all_manifolds()) {
    Dataset a = synth_wrapped_mixture(m, 4, 20.0, 200, 11);
    Dataset b = synth_wrapped_mixture(m, 4, 20.0, 200, 11);
    REQUIRE(a.points.size() == 200);
    for (size_t i = 0; i < a.points.size(); ++i) {
      CHECK(point_ok(a.points[i]));
      CHECK(a.points[i].coords == b.points[i].coords);
    }
  }
}

TEST_CASE("huge concentration collapses samples onto the centers") {
  ManifoldSpec m{ManifoldKind::Sphere2, 2};
  Dataset centers_only = synth_wrapped_mixture(m, 4, 1e6, 400, 17);
  // recover centers from a fresh draw at moderate concentration with the
  // same seed: the component centers are derived from the seed alone
  Dataset again = synth_wrapped_mixture(m, 4, 1e6, 4, 17);
  for (const auto& p : centers_only.points) {
    double best = 1e9;
    for (const auto& c : again.points) best = std::min(best, geodesic_distance(p, c));
    CHECK(best < 1e-2);
  }
}

TEST_CASE("ball mixture centers stay within radius 0.8") {
  ManifoldSpec m{ManifoldKind::PoincareBall, 2};
  Dataset ds = synth_wrapped_mixture(m, 6, 1e6, 120, 23);
  for (const auto& p : ds.points) {
    double r = std::sqrt(geo::dot(p.coords, p.coords));
    CHECK(r < 0.8 + 1e-2);
  }
}

TEST_CASE("split is disjoint, exhaustive, deterministic") {
  Dataset ds = synth_wrapped_mixture({ManifoldKind::FlatTorus, 2}, 2, 10.0, 100, 31);
  auto [tr1, te1] = split(ds, 0.8, 5);
  auto [tr2, te2] = split(ds, 0.8, 5);
  CHECK(tr1.points.size() == 80);
  CHECK(te1.points.size() == 20);
  for (size_t i = 0; i < tr1.points.size(); ++i)
    CHECK(tr1.points[i].coords == tr2.points[i].coords);
  // exhaustive: multiset of coordinates matches
  auto key = [](const ManifoldPoint& p) { return std::make_pair(p.coords[0], p.coords[1]); };
  std::vector<std::pair<double, double>> all, join;
  for (const auto& p : ds.points) all.push_back(key(p));
  for (const auto& p : tr1.points) join.push_back(key(p));
  for (const auto& p : te1.points) join.push_back(key(p));
  std::sort(all.begin(), all.end());
  std::sort(join.begin(), join.end());
  CHECK(all == join);
  CHECK_THROWS(split(ds, 0.001, 5));
}

TEST_CASE("wrapped normal concentrates near its center") {
  Rng rng(81);
  for (const auto& m : testutil::all_manifolds()) {
    ManifoldPoint c = testutil::random_point(m, rng);
    double mean = 0.0;
    int n = 200;
    for (int k = 0; k < n; ++k)
      mean += geodesic_distance(c, sample_wrapped_normal(c, 0.05, rng));
    CHECK(mean / n < 0.2);
  }
}

TEST_CASE("ball prior: samples follow the stated density radially") {
  // mean geodesic distance from the origin under the sampler vs the density
  ManifoldSpec m{ManifoldKind::PoincareBall, 2};
  Rng rng(82);
  double mc = 0.0;
  int n = 40000;
  for (int k = 0; k < n; ++k) {
    ManifoldPoint p = sample_ball_prior(m, rng);
    mc += geodesic_distance(ManifoldPoint{m, {0, 0}}, p);
  }
  mc /= n;
  // quadrature of r * density over the disk
  double quad = 0.0;
  int res = 500;
  double rmax = 0.99995, h = 2.0 * rmax / res;
  for (int i = 0; i < res; ++i)
    for (int j = 0; j < res; ++j) {
      double a = -rmax + (i + 0.5) * h, b = -rmax + (j + 0.5) * h;
      double r2 = a * a + b * b;
      if (r2 >= rmax * rmax) continue;
      double lam = 2.0 / (1.0 - r2);
      double r = 2.0 * std::atanh(std::sqrt(r2));
      quad += r * std::exp(ball_prior_log_density(m, ManifoldPoint{m, {a, b}})) * lam * lam *
              h * h;
    }
  CHECK(mc == doctest::Approx(quad).epsilon(0.02));
}

TEST_CASE("prior dispatch: uniform density constants on compacts") {
  CHECK(prior_log_density({ManifoldKind::Sphere2, 2}, ManifoldPoint{}) ==
        doctest::Approx(-std::log(4.0 * kPi)));
  CHECK(prior_log_density({ManifoldKind::SO3, 3}, ManifoldPoint{}) ==
        doctest::Approx(-std::log(8.0 * kPi * kPi)));
}
