#pragma once

#include "focalforge/jacobi.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace ff {

/// Quotient data of a built-in foliation: projection to quotient
/// coordinates plus a metric model for the regular part (used by the
/// intrinsicality checks and the saturated-preimage construction).
struct QuotientDescriptor {
  std::function<Vec(const Vec&)> project;
  std::shared_ptr<const RiemannianSpace> model;
  std::string description;
};

/// A singular Riemannian foliation given by leaf data. The leaf-dimension
/// callable is an exact integer oracle (with a small documented snap
/// tolerance at the singular stratum); `singular_distance`, when present,
/// is the exact distance to the singular stratum and is what the crossing
/// localization bisects on. Killing generators span the leaves for every
/// built-in; foliations without enough generators are rejected by the
/// vertical-basis construction.
struct FoliationSpec {
  std::shared_ptr<const RiemannianSpace> parent;
  int regular_leaf_dim = 0;
  std::function<int(const Vec&)> leaf_dim;
  std::function<std::vector<Vec>(const Vec&)> vertical_frame;
  std::vector<std::function<Vec(const Vec&)>> killing_generators;
  std::optional<QuotientDescriptor> quotient;
  std::function<double(const Vec&)> singular_distance;  // empty when no singular leaves
  std::string name;
};

// Built-in foliations.

/// Concentric spheres about the origin of euclidean(m); the origin is the
/// only singular leaf. Quotient: the flat ray r >= 0.
FoliationSpec concentric_spheres_foliation(int m);

/// Hopf circle foliation of round_sphere(3,1); regular everywhere.
/// Quotient: round_sphere(2, 1/2).
FoliationSpec hopf_foliation();

/// Circles about the z-axis at each height in product(R^2, R); the z-axis
/// consists of point leaves. Quotient: the flat half plane (r, z).
FoliationSpec circles_x_line_foliation();

/// Trivial foliation by points (every leaf regular of dimension 0).
FoliationSpec trivial_point_foliation(std::shared_ptr<const RiemannianSpace> space);

struct HorizontalityReport {
  bool horizontal = false;
  double max_deviation = 0.0;
};

/// True iff <gamma'(t), V> stays below tol for every vertical frame vector
/// at every grid node.
HorizontalityReport horizontality_check(const GeodesicTrace& geodesic,
                                        const FoliationSpec& foliation, double tol = 1e-7);

struct SingularCrossing {
  double time = 0.0;
  int leaf_dim = 0;  // dimension of the singular leaf met
  int drop = 0;      // dim L_{gamma(a)} - leaf_dim
};

/// Singular-stratum crossings of a horizontal geodesic, localized to
/// params.bisect_tol by minimizing the singular distance along the trace.
/// Transversality is asserted: the leaf dimension recovers within one grid
/// step on both sides.
std::vector<SingularCrossing> singular_crossings(const GeodesicTrace& geodesic,
                                                 const FoliationSpec& foliation,
                                                 const NumericParams& params = {});

/// Crossing number c(gamma): sum of leaf-dimension drops over the singular
/// crossings. Endpoints must lie on regular leaves and the geodesic must be
/// horizontal.
int crossing_number(const GeodesicTrace& geodesic, const FoliationSpec& foliation,
                    const NumericParams& params = {});

/// The vertical Jacobi space W^gamma realized by Killing-generator
/// restrictions along a horizontal geodesic, in the parallel frame of the
/// normal space of gamma'.
struct VerticalJacobiTrace {
  FrameTrace frame_trace;
  int vertical_rank = 0;       // d(gamma) = max_t leaf dim
  std::vector<Mat> value;      // per node: m x d
  std::vector<Mat> derivative; // per node: m x d
  double max_jacobi_residual = 0.0;
  double max_span_deviation = 0.0;  // against the vertical frame on regular nodes
};

/// Build W^gamma from the foliation's Killing generators. Throws
/// ConstructionError when the generators cannot span the leaves along the
/// geodesic. Each restriction is verified to solve the Jacobi equation and
/// to span the vertical space at regular nodes.
VerticalJacobiTrace vertical_jacobi_basis(const GeodesicTrace& geodesic,
                                          const FoliationSpec& foliation,
                                          const NumericParams& params = {});

/// W-focal index: sum over interior W-focal times of the dimension of
/// vertical fields vanishing there. Cross-checked by callers against
/// crossing_number for regular horizontal geodesics.
int w_focal_index(const VerticalJacobiTrace& vertical, const NumericParams& params = {});
int w_focal_index(const GeodesicTrace& geodesic, const FoliationSpec& foliation,
                  const NumericParams& params = {});

/// Interior W-focal times of the vertical basis (diagnostic surface for the
/// crossing-coincidence invariant).
std::vector<double> w_focal_times(const VerticalJacobiTrace& vertical,
                                  const NumericParams& params = {});

}  // namespace ff
