#pragma once

#include "focalforge/errors.hpp"
#include "focalforge/types.hpp"

#include <functional>
#include <memory>
#include <string>

namespace ff {

/// Map from chart coordinates to a symmetric positive-definite matrix.
using MetricMap = std::function<Mat(const Vec&)>;

/// A Riemannian space from one of four families.
///
/// Euclidean and round-sphere kinds are represented embedded: points are
/// ambient coordinate vectors (length `embedding_dimension()`), tangent
/// vectors are ambient vectors satisfying the linear constraint. The
/// chart-metric kind works in coordinates with a caller-supplied metric;
/// products concatenate factor coordinates. Values are immutable after
/// construction and safe to share across threads.
class RiemannianSpace {
 public:
  enum class Kind { Euclidean, RoundSphere, ChartMetric, Product };

  static RiemannianSpace euclidean(int n);
  static RiemannianSpace round_sphere(int n, double radius);
  static RiemannianSpace chart_metric(int n, MetricMap g, double christoffel_step = 1e-5,
                                      double curvature_step = 2.5e-4);
  static RiemannianSpace product(RiemannianSpace a, RiemannianSpace b);

  Kind kind() const { return kind_; }
  int dimension() const { return dim_; }
  int embedding_dimension() const { return emb_dim_; }
  double radius() const { return radius_; }
  const RiemannianSpace& factor(int i) const;

  /// True when the curvature vanishes identically (Euclidean or a product
  /// of flat factors); integrator fast paths key off this.
  bool flat() const;

  /// Metric in the canonical tangent basis at `point` (see tangent_basis):
  /// identity for the embedded kinds, g(point) for chart metrics, block
  /// diagonal for products. Always symmetric positive definite.
  Mat metric_at(const Vec& point) const;

  /// Orthonormal basis of the tangent space at `point`, one ambient/chart
  /// column per dimension. For embedded kinds the basis is completed from
  /// the constraint normal; for chart metrics it g-orthonormalizes the
  /// coordinate basis.
  Mat tangent_basis(const Vec& point) const;

  /// R(u, w)w with sign convention <R(u,w)w, u> = K |u|^2|w|^2 for
  /// orthonormal u,w (round sphere of radius r gives K = 1/r^2).
  Vec curvature_operator(const Vec& point, const Vec& u, const Vec& w) const;

  /// Same without the domain checks; used by integrator right-hand sides
  /// whose stage states sit slightly off the constraint manifold.
  Vec curvature_unchecked(const Vec& point, const Vec& u, const Vec& w) const;

  /// Geodesic acceleration x'' = a(x, v).
  Vec geodesic_acceleration(const Vec& point, const Vec& velocity) const;

  /// Right-hand side of parallel transport along (point, velocity):
  /// E' = transport_rhs(x, v, E) keeps E parallel.
  Vec parallel_transport_rhs(const Vec& point, const Vec& velocity, const Vec& e) const;

  /// Riemannian inner product of tangent vectors at `point`.
  double inner(const Vec& point, const Vec& a, const Vec& b) const;
  double norm(const Vec& point, const Vec& a) const;

  /// Residual of the embedding constraint (0 for non-embedded kinds).
  double constraint_residual(const Vec& point) const;

  /// Re-projection onto the constraint manifold (identity when flat).
  void project(Vec& point, Vec& velocity) const;

  /// Throws DomainError naming the violated constraint when `point` is off
  /// the coordinate domain (|point| - r for spheres).
  void check_point(const Vec& point, double tol = 1e-9) const;
  void check_tangent(const Vec& point, const Vec& u, double tol = 1e-7) const;

  /// Christoffel symbols of a chart metric at x; gamma[k](i,j) = Gamma^k_ij.
  std::vector<Mat> christoffel(const Vec& x) const;

  std::string describe() const;

 private:
  RiemannianSpace() = default;

  Kind kind_ = Kind::Euclidean;
  int dim_ = 0;
  int emb_dim_ = 0;
  double radius_ = 0.0;
  MetricMap metric_;
  double christoffel_step_ = 1e-5;
  double curvature_step_ = 2.5e-4;
  std::shared_ptr<const RiemannianSpace> left_, right_;
};

}  // namespace ff
