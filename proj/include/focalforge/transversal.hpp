#pragma once

#include "focalforge/foliation.hpp"
#include "focalforge/rng.hpp"

namespace ff {

/// Wilking's transversal system along a horizontal geodesic: the extended
/// vertical bundle W~, the orthogonal complement frame H, the A-tensor and
/// the transversal curvature R^H, all per grid node in the parallel frame
/// of the normal space of gamma'.
struct TransversalSystem {
  VerticalJacobiTrace vertical;
  int h_dim = 0;                 // m - d(gamma)
  std::vector<Mat> wtilde;       // per node: m x d orthonormal
  std::vector<Mat> h_frame;      // per node: m x h orthonormal, orthogonal to W~
  std::vector<Mat> a_tensor;     // per node: h x d, on W~-basis coordinates
  std::vector<Mat> r_h;          // per node: h x h symmetric
  double max_rh_asymmetry = 0.0;
  double max_wtilde_jump = 0.0;  // node-to-node principal-angle sine
};

/// Per-node extension of W(t) by derivative vectors of vanishing vertical
/// fields; rank exactly d(gamma) everywhere. Throws RankGapError when the
/// completion stays rank-deficient.
std::vector<Mat> extend_vertical_bundle(const VerticalJacobiTrace& vertical,
                                        const NumericParams& params = {});

TransversalSystem build_transversal_system(const GeodesicTrace& geodesic,
                                           const FoliationSpec& foliation,
                                           const NumericParams& params = {});

/// A-tensor at a node applied to W~-basis coefficients; result in H-frame
/// coordinates. Completion directions (derivatives of vanishing fields) map
/// to zero.
Vec a_tensor_at(const TransversalSystem& system, int node, const Vec& w_coeffs);

/// R^H at a node applied to H-frame coefficients: P(R(Y)) + 3 A A*(Y).
Vec transversal_curvature_at(const TransversalSystem& system, int node, const Vec& y_coeffs);

/// Adjoint defect max |<A w, h> - <w, A* h>| sampled at random nodes and
/// vectors (diagnostic for tests).
double a_adjoint_defect(const TransversalSystem& system, Rng& rng, int samples = 50);

/// Transversal Jacobi solutions for the H-projections of a complement of W
/// inside the L-Jacobi space of `patch`, integrated on the trace grid.
struct TransversalSolution {
  std::vector<double> times;
  std::vector<Mat> value;       // per node: h x (m - d)
  std::vector<Mat> derivative;  // per node: h x (m - d)
};

/// Horizontal index ind_{Lambda^L / W}: focal count (with corank
/// multiplicities) of the transversal solutions on the open interval.
/// `complement_rng`, when non-null, randomizes the complement of W in
/// Lambda^L (the index does not depend on the choice).
int horizontal_index(const SubmanifoldPatch& patch, const Vec& u, const Vec& coeffs,
                     const FoliationSpec& foliation, const NumericParams& params = {},
                     Rng* complement_rng = nullptr);

struct SplitReport {
  int ind_total = 0;
  int ind_vertical = 0;
  int ind_horizontal = 0;
  bool holds = false;
};

/// Index splitting ind_W + ind_{Lambda^L/W} = ind_{Lambda^L} for the
/// unit-parameter L-geodesic seeded at (u, coeffs). The endpoint must be
/// non-focal.
SplitReport verify_index_splitting(const SubmanifoldPatch& patch, const Vec& u, const Vec& coeffs,
                                   const FoliationSpec& foliation,
                                   const NumericParams& params = {});

}  // namespace ff
