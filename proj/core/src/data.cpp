#include "gfm/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "gfm/geometry.hpp"

namespace gfm {

namespace {

std::vector<double> parse_row(const std::string& line, size_t lineno, size_t ncols) {
  std::vector<double> row;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      row.push_back(std::stod(cell));
    } catch (const std::exception&) {
      throw ParseError("line " + std::to_string(lineno) + ": bad number '" + cell + "'");
    }
  }
  if (row.size() != ncols)
    throw ParseError("line " + std::to_string(lineno) + ": expected " +
                     std::to_string(ncols) + " columns, got " + std::to_string(row.size()));
  return row;
}

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  return in;
}

}  // namespace

Dataset load_geodata_csv(const std::string& path) {
  auto in = open_or_throw(path);
  Dataset ds{ManifoldSpec{ManifoldKind::Sphere2, 2}, {}, path};
  std::string line;
  size_t lineno = 0;
  bool header = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    auto row = parse_row(line, lineno, 2);
    double lat = row[0], lon = row[1];
    if (lat < -90.0 || lat > 90.0)
      throw ParseError("line " + std::to_string(lineno) + ": lat out of range");
    if (lon < -180.0 || lon > 180.0)
      throw ParseError("line " + std::to_string(lineno) + ": lon out of range");
    double phi = lat * kPi / 180.0, lam = lon * kPi / 180.0;
    ManifoldPoint p{ds.manifold,
                    {std::cos(phi) * std::cos(lam), std::cos(phi) * std::sin(lam),
                     std::sin(phi)}};
    check_point(p);
    ds.points.push_back(std::move(p));
  }
  return ds;
}

Dataset load_angles_csv(const std::string& path, int n) {
  auto in = open_or_throw(path);
  Dataset ds{ManifoldSpec{ManifoldKind::FlatTorus, n}, {}, path};
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto row = parse_row(line, lineno, static_cast<size_t>(n));
    for (auto& a : row) a = ad::wrap_2pi(a);
    ds.points.push_back(ManifoldPoint{ds.manifold, std::move(row)});
  }
  return ds;
}

void write_dataset_csv(const Dataset& ds, const std::string& path) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw ParseError("cannot write " + tmp);
    char buf[64];
    for (const auto& p : ds.points) {
      for (size_t i = 0; i < p.coords.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g", p.coords[i]);
        out << (i ? "," : "") << buf;
      }
      out << "\n";
    }
  }
  std::rename(tmp.c_str(), path.c_str());
}

ManifoldPoint sample_wrapped_normal(const ManifoldPoint& center, double scale, Rng& rng) {
  auto frame = tangent_frame(center);
  std::vector<double> v(center.coords.size(), 0.0);
  for (const auto& e : frame) {
    double z = scale * rng.normal();
    for (size_t i = 0; i < v.size(); ++i) v[i] += z * e.components[i];
  }
  return exp_map(center, TangentVector{center, v});
}

Dataset synth_wrapped_mixture(const ManifoldSpec& spec, int n_components,
                              double concentration, int n_samples, uint64_t seed) {
  if (n_components < 1) throw std::invalid_argument("n_components >= 1 required");
  if (concentration <= 0.0) throw std::invalid_argument("concentration > 0 required");
  Rng crng(Rng::derive(seed, 0xC0));
  std::vector<ManifoldPoint> centers;
  for (int c = 0; c < n_components; ++c) {
    if (spec.kind == ManifoldKind::PoincareBall) {
      ManifoldPoint origin{spec, std::vector<double>(spec.n, 0.0)};
      ManifoldPoint p = sample_wrapped_normal(origin, 1.0, crng);
      double r = std::sqrt(geo::dot(p.coords, p.coords));
      if (r > 0.8)
        for (auto& x : p.coords) x *= 0.8 / r;
      centers.push_back(std::move(p));
    } else {
      centers.push_back(sample_uniform(spec, crng));
    }
  }
  double scale = 1.0 / std::sqrt(concentration);
  Rng rng(Rng::derive(seed, 0xD0));
  Dataset ds{spec, {}, "wrapped_mixture"};
  ds.points.reserve(n_samples);
  for (int i = 0; i < n_samples; ++i) {
    int c = static_cast<int>(rng.integer(static_cast<uint64_t>(n_components)));
    ds.points.push_back(sample_wrapped_normal(centers[c], scale, rng));
  }
  return ds;
}

std::pair<Dataset, Dataset> split(const Dataset& ds, double train_fraction, uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw std::invalid_argument("train_fraction must be in (0,1)");
  size_t n = ds.points.size();
  size_t ntrain = static_cast<size_t>(train_fraction * n);
  if (ntrain == 0 || ntrain == n)
    throw std::invalid_argument("split leaves an empty side");
  std::vector<size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(Rng::derive(seed, 0x5B));
  for (size_t i = n - 1; i > 0; --i) {
    size_t j = rng.integer(i + 1);
    std::swap(idx[i], idx[j]);
  }
  Dataset train{ds.manifold, {}, ds.name + ":train"};
  Dataset test{ds.manifold, {}, ds.name + ":test"};
  for (size_t k = 0; k < n; ++k)
    (k < ntrain ? train : test).points.push_back(ds.points[idx[k]]);
  return {std::move(train), std::move(test)};
}

ManifoldPoint sample_ball_prior(const ManifoldSpec& spec, Rng& rng) {
  ManifoldPoint origin{spec, std::vector<double>(spec.n, 0.0)};
  return sample_wrapped_normal(origin, 1.0, rng);
}

double ball_prior_log_density(const ManifoldSpec& spec, const ManifoldPoint& y) {
  int n = spec.n;
  double nr = std::sqrt(geo::dot(y.coords, y.coords));
  double r = 2.0 * ad::artanh(std::min(nr, 1.0 - kBallEps));
  double log_gauss = -0.5 * n * std::log(2.0 * kPi) - 0.5 * r * r;
  double log_jac;  // (n-1) * log(sinh r / r)
  if (r < 1e-6)
    log_jac = (n - 1) * std::log1p(r * r / 6.0);
  else
    log_jac = (n - 1) * (std::log(std::sinh(r)) - std::log(r));
  return log_gauss - log_jac;
}

ManifoldPoint sample_prior(const ManifoldSpec& spec, Rng& rng) {
  if (spec.kind == ManifoldKind::PoincareBall) return sample_ball_prior(spec, rng);
  return sample_uniform(spec, rng);
}

double prior_log_density(const ManifoldSpec& spec, const ManifoldPoint& x) {
  if (spec.kind == ManifoldKind::PoincareBall) return ball_prior_log_density(spec, x);
  return -std::log(manifold_volume(spec));
}

}  // namespace gfm
