#pragma once

#include "focalforge/foliation.hpp"
#include "focalforge/jacobi.hpp"
#include "focalforge/rng.hpp"

#include <optional>
#include <string>
#include <vector>

namespace ff {

/// Broken-ray polygon in the normal bundle: segment i (outermost first)
/// follows the ray of w_i = (parameter u[i], coefficients c[i]) on the
/// global time interval [t[i+1], t[i]], reaching w_i exactly at t[i];
/// t[0] = 1 and t.back() = 0.
struct EtaPolygon {
  std::vector<double> t;
  std::vector<Vec> u;
  std::vector<Vec> c;
  std::vector<double> junction_residuals;  // exp-image agreement at breakpoints
  double norm_v = 0.0;                     // |w_0|, the outer vector's length

  int segments() const { return static_cast<int>(u.size()); }
};

/// First focal parameter m(v): the largest focal time of the segment s_v
/// strictly below 1, or 0 when the interior index vanishes.
double first_focal_param(const SubmanifoldPatch& patch, const Vec& u, const Vec& coeffs,
                         const NumericParams& params = {});

struct ZvSample {
  std::vector<EtaPolygon> polygons;
  int depth = 0;
  int per_level = 0;
  int depth_cap = 0;
  std::vector<std::string> diagnostics;  // per-branch fiber-sampling failures
};

/// Recursive polygon sampling: follow s_v to the first focal vector, draw
/// per_level points from the exp-fiber component through it, recurse on
/// each. Fiber-sampling failures leave partial output with diagnostics.
ZvSample sample_Zv(const SubmanifoldPatch& patch, const Vec& u, const Vec& coeffs, int per_level,
                   Rng& rng, const NumericParams& params = {});

/// Telescoping energy of the polygon recomputed segment-wise; returns the
/// deviation from |v|^2.
double energy_identity_check(const EtaPolygon& polygon, const SubmanifoldPatch& patch);

/// Max per-segment geodesic residual: exp-image agreement at breakpoints.
double polygon_breakpoint_residual(const EtaPolygon& polygon, const SubmanifoldPatch& patch,
                                   const NumericParams& params = {});

struct DeltaDimension {
  int index = 0;  // i(v): interior focal multiplicity sum
  std::optional<int> foliation_crosscheck;  // sum of leaf-dimension drops, when applicable
};

/// i(v) with an optional cross-check against singular-crossing drops when
/// the patch is a regular leaf of `foliation` and every focal time comes
/// from a singular crossing.
DeltaDimension delta_dimension(const SubmanifoldPatch& patch, const Vec& u, const Vec& coeffs,
                               const FoliationSpec* foliation = nullptr,
                               const NumericParams& params = {});

/// Sum over focal times of the dimension of L-Jacobi fields vanishing
/// there, recomputed from a doubled-resolution trace with a ray-neighborhood
/// regularity check per crossing (precondition error on non-regular ones).
int tangent_decomposition_dim(const SubmanifoldPatch& patch, const Vec& u, const Vec& coeffs,
                              const NumericParams& params = {});

/// Recursion tree for the iterated-bundle dimension bookkeeping: a node
/// carries the focal time, the fiber-component dimension at that level
/// (the base of the projection), and child descriptors.
struct BundleNode {
  double focal_time = 0.0;
  int base_dim = 0;
  std::vector<BundleNode> children;
};

struct BundleDescriptor {
  std::optional<BundleNode> root;  // empty tree: no focal levels
};

/// cohdim(leaf) = 0; cohdim(node) = cohdim(children) + base_dim. All
/// children of a node must agree (malformed tree otherwise).
int cohdim_bookkeeping(const BundleDescriptor& descriptor);

/// Build the descriptor from the focal chain of (u, coeffs): each level
/// re-integrates the rescaled vector and reads off the outermost focal
/// record.
BundleDescriptor build_bundle_descriptor(const SubmanifoldPatch& patch, const Vec& u,
                                         const Vec& coeffs, const NumericParams& params = {});

}  // namespace ff
