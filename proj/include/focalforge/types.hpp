#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace ff {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Numerical knobs shared across the toolkit. All tolerances are positive;
/// `scaled(s)` returns a copy with the accuracy-like tolerances multiplied by
/// `s` (used for tolerance-halving stability checks).
struct NumericParams {
  double ode_tol = 1e-10;           // per-step error target of the integrator
  int nodes_per_unit = 2048;        // fixed output grid density (nodes per unit parameter)
  double christoffel_step = 1e-5;   // central-difference step for chart-metric Christoffels
  double curvature_step = 2.5e-4;   // second-difference step for chart-metric curvature
  double sv_gap = 1e3;              // retained/discarded singular-value ratio for corank
  double focal_zero_tol = 1e-6;     // relative smallness of a "vanishing" singular value
  double candidate_tol = 1e-3;      // relative dip that triggers focal refinement
  double bisect_tol = 1e-9;         // focal/singular-time localization accuracy
  double endpoint_tol = 1e-8;       // |t* - 1| window counting as "focal at the endpoint"
  double newton_tol = 1e-10;        // shooting residual target
  double dedup_tol = 1e-6;          // normal-bundle distance identifying critical points
  double frame_tol = 1e-10;         // orthonormality slack for frames
  double probe_radius = 1e-2;       // seed-ball radius for fiber sampling
  double pca_gap = 1e3;             // eigenvalue gap for cloud dimension estimates
  int max_newton_iter = 40;
  int recursion_cap = 6;            // linking-cycle depth guard
  int fiber_sample_cap = 64;        // per-level sample guard

  NumericParams scaled(double s) const {
    NumericParams p = *this;
    p.ode_tol *= s;
    p.focal_zero_tol *= s;
    p.bisect_tol *= s;
    p.newton_tol *= s;
    return p;
  }
};

}  // namespace ff
