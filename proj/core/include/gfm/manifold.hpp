#pragma once

// Double-precision manifold API with invariant checking. The scalar-generic
// kernels live in geometry.hpp; this layer owns the point/tangent types used
// across the library, plus sampling and frames.

#include <vector>

#include "gfm/geometry.hpp"
#include "gfm/rng.hpp"

namespace gfm {

struct InvariantError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InvalidTangentError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ContractError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ManifoldPoint {
  ManifoldSpec manifold;
  std::vector<double> coords;
};

struct TangentVector {
  ManifoldPoint base;
  std::vector<double> components;
};

// Invariant checks; throw InvariantError with a description on failure.
void check_point(const ManifoldPoint& x);
bool point_ok(const ManifoldPoint& x, double scale = 1.0);
void check_tangent(const TangentVector& v);
bool tangent_ok(const TangentVector& v, double tol_scale = 1.0);

ManifoldPoint exp_map(const ManifoldPoint& x, const TangentVector& v);
TangentVector log_map(const ManifoldPoint& x, const ManifoldPoint& y);
TangentVector tangent_project(const ManifoldPoint& x, const std::vector<double>& w);
double metric_inner(const ManifoldPoint& x, const TangentVector& u, const TangentVector& v);
double geodesic_distance(const ManifoldPoint& x, const ManifoldPoint& y);

// g-orthonormal tangent basis at x (d vectors).
std::vector<TangentVector> tangent_frame(const ManifoldPoint& x);

// Snap a nearby ambient vector back onto the manifold (renormalization,
// polar projection, wrapping, radius clip).
ManifoldPoint project_to_manifold(const ManifoldSpec& m, std::vector<double> coords);

// Normalized Riemannian volume measure; compact manifolds only.
ManifoldPoint sample_uniform(const ManifoldSpec& m, Rng& rng);

// Riemannian volume of a compact manifold under the conventions above.
double manifold_volume(const ManifoldSpec& m);

}  // namespace gfm
