#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gfm/manifold.hpp"
#include "gfm/rng.hpp"

namespace gfm {

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Dataset {
  ManifoldSpec manifold;
  std::vector<ManifoldPoint> points;
  std::string name;
};

// lat,lon header, degrees; rows mapped to unit vectors.
Dataset load_geodata_csv(const std::string& path);

// n numeric columns of radians, wrapped into [0, 2*pi).
Dataset load_angles_csv(const std::string& path, int n);

void write_dataset_csv(const Dataset& ds, const std::string& path);

// Mixture of wrapped normals: per-component center fixed by seed, tangent
// gaussian with scale 1/sqrt(concentration) pushed through exp.
Dataset synth_wrapped_mixture(const ManifoldSpec& spec, int n_components,
                              double concentration, int n_samples, uint64_t seed);

std::pair<Dataset, Dataset> split(const Dataset& ds, double train_fraction, uint64_t seed);

// Wrapped normal at `center`: tangent gaussian in an orthonormal frame with
// per-axis stddev `scale`, pushed through the exponential map.
ManifoldPoint sample_wrapped_normal(const ManifoldPoint& center, double scale, Rng& rng);

// Prior on the Poincare ball: wrapped normal at the origin, sigma = 1.
ManifoldPoint sample_ball_prior(const ManifoldSpec& spec, Rng& rng);
double ball_prior_log_density(const ManifoldSpec& spec, const ManifoldPoint& y);

// Prior dispatcher: uniform on compact manifolds, wrapped normal on the ball.
ManifoldPoint sample_prior(const ManifoldSpec& spec, Rng& rng);
double prior_log_density(const ManifoldSpec& spec, const ManifoldPoint& x);

}  // namespace gfm
