#pragma once

#include "focalforge/geometry.hpp"
#include "focalforge/patch.hpp"
#include "focalforge/types.hpp"

#include <memory>
#include <vector>

namespace ff {

/// Record of the adaptive stepping behind a trace.
struct StepControlRecord {
  long accepted_steps = 0;
  long rejected_steps = 0;
  double min_step = 0.0;
  double max_step = 0.0;
  double tolerance = 0.0;
};

/// Discretized geodesic on the fixed output grid (nodes_per_unit nodes per
/// unit parameter, overlaid on the adaptive steps). Immutable once built.
struct GeodesicTrace {
  std::shared_ptr<const RiemannianSpace> space;
  double horizon = 0.0;
  std::vector<double> times;
  std::vector<Vec> position;
  std::vector<Vec> velocity;
  StepControlRecord control;

  int nodes() const { return static_cast<int>(times.size()); }
  double metric_speed(int node) const {
    return space->norm(position[node], velocity[node]);
  }
  /// Max relative speed drift along the trace.
  double speed_drift() const;
  /// Max embedding-constraint residual along the trace.
  double max_constraint_residual() const;
  /// Position at arbitrary t by cubic Hermite interpolation on the grid.
  Vec position_at(double t) const;
  Vec velocity_at(double t) const;
};

/// Integrate the geodesic through (point, velocity) up to `horizon` with
/// per-step error <= params.ode_tol, re-projecting onto the constraint
/// manifold after every step. Throws IntegrationError carrying the last
/// good time on step-size underflow.
GeodesicTrace integrate_geodesic(std::shared_ptr<const RiemannianSpace> space, const Vec& point,
                                 const Vec& velocity, double horizon,
                                 const NumericParams& params = {});

/// Normal exponential map: endpoint of the unit-parameter geodesic with
/// initial velocity v at patch parameter u. v must lie in the span of the
/// patch normal frame.
Vec normal_exp(const SubmanifoldPatch& patch, const Vec& u, const Vec& v,
               const NumericParams& params = {});

/// Orthonormal basis of the orthogonal complement of `unit_dir` in the
/// tangent space at `point`, built deterministically from the canonical
/// tangent basis.
Mat normal_space_basis(const RiemannianSpace& space, const Vec& point, const Vec& unit_dir);

}  // namespace ff
