#pragma once

#include "focalforge/geometry.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace ff {

/// A parametrized submanifold with orthonormal tangent and normal frames;
/// the domain of the normal exponential map. Frames are caller-supplied
/// callables (closed-form for all built-ins) returning mutually orthonormal
/// vectors whose counts sum to dim(parent). Zero-dimensional parameter
/// boxes (point submanifolds) are supported: the tangent frame is empty and
/// the normal frame is a full tangent-space basis.
struct SubmanifoldPatch {
  using PointMap = std::function<Vec(const Vec&)>;
  using FrameMap = std::function<std::vector<Vec>(const Vec&)>;

  std::shared_ptr<const RiemannianSpace> parent;
  PointMap parametrization;
  FrameMap tangent_frame;
  FrameMap normal_frame;
  int leaf_dimension = 0;
  Vec param_lo, param_hi;          // seeding box
  std::vector<bool> param_periodic;
  std::string name;

  int normal_rank() const { return parent->dimension() - leaf_dimension; }

  Vec point_at(const Vec& u) const { return parametrization(u); }

  /// Normal vector with coefficients c in the normal frame at parameter u.
  Vec normal_vector(const Vec& u, const Vec& c) const;

  /// Max Gram deviation of the combined frame from the identity.
  double frame_orthonormality_defect(const Vec& u) const;
};

/// Shape operator in the tangent frame at `parameter` for a unit `normal`,
/// sign convention: the sphere S^{n-1}(r) in R^n with inward normal has
/// shape operator +(1/r) I. The normal must be unit length within 1e-9.
Mat shape_operator(const SubmanifoldPatch& patch, const Vec& parameter, const Vec& normal);

// Built-in patches. All frames are closed-form and orthonormal.

/// Axis hyperplane {x_n = offset} in euclidean(n).
SubmanifoldPatch hyperplane_patch(int n, double offset = 0.0);

/// Circle of radius r about the origin in euclidean(2); normal frame is the
/// outward radial direction.
SubmanifoldPatch circle_patch(double r);

/// Round sphere of radius r about the origin in euclidean(3); outward normal.
SubmanifoldPatch sphere_patch(double r);

/// Circle of radius r in the plane {z = height} of euclidean(3), centered on
/// the z-axis. Normal frame: outward radial and vertical.
SubmanifoldPatch circle_in_r3_patch(double r, double height);

/// Single point {p}; tangent frame empty, normal frame a full basis.
SubmanifoldPatch point_patch(std::shared_ptr<const RiemannianSpace> space, const Vec& p);

/// Hopf fiber through base_point on round_sphere(3,1), i.e. the great circle
/// {e^{i t} p} in C^2 = R^4 with coordinates (Re z1, Im z1, Re z2, Im z2).
SubmanifoldPatch hopf_fiber_patch(const Vec& base_point);

/// Ellipse (a cos t, b sin t) in euclidean(2); normal frame is outward.
SubmanifoldPatch ellipse_patch(double a, double b);

}  // namespace ff
