#include "focalforge/transversal.hpp"

#include "rank_scan.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <cmath>
#include <sstream>

namespace ff {

namespace {
constexpr double kCompletionSwitch = 1e-5;  // relative sigma below which W~ needs completion

// Principal-angle sine between two orthonormal column spans.
double span_gap(const Mat& qa, const Mat& qb) {
  if (qa.cols() == 0) return 0.0;
  const Mat residual = qb - qa * (qa.transpose() * qb);
  return detail::matrix_singular_values(residual)[0];
}
}  // namespace

std::vector<Mat> extend_vertical_bundle(const VerticalJacobiTrace& vertical,
                                        const NumericParams& params) {
  const int n = vertical.frame_trace.geodesic.nodes();
  const int d = vertical.vertical_rank;
  const int m = d > 0 ? static_cast<int>(vertical.value.front().rows())
                      : vertical.frame_trace.geodesic.space->dimension() - 1;
  std::vector<Mat> wtilde(n, Mat(m, d));
  if (d == 0) {
    for (auto& w : wtilde) w.resize(m, 0);
    return wtilde;
  }

  double scale = 0.0;
  for (int k = 0; k < n; ++k)
    scale = std::max(scale, detail::matrix_singular_values(vertical.value[k])[0]);

  std::vector<int> completion_nodes;
  for (int k = 0; k < n; ++k) {
    const Eigen::JacobiSVD<Mat> svd(vertical.value[k],
                                    Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vec sv = svd.singularValues();
    Mat cols(m, d);
    int filled = 0;
    for (int i = 0; i < d; ++i)
      if (sv[i] > kCompletionSwitch * scale) cols.col(filled++) = svd.matrixU().col(i);
    // Complete with derivative vectors of the (near-)vanishing combinations.
    for (int i = 0; i < d; ++i) {
      if (sv[i] > kCompletionSwitch * scale) continue;
      if (completion_nodes.empty() || completion_nodes.back() != k) completion_nodes.push_back(k);
      Vec cand = vertical.derivative[k] * svd.matrixV().col(i);
      for (int j = 0; j < filled; ++j) cand -= cols.col(j).dot(cand) * cols.col(j);
      const double norm = cand.norm();
      if (norm < 1e3 * params.focal_zero_tol * scale) {
        std::ostringstream msg;
        msg << "extend_vertical_bundle: completion rank-deficient at node " << k;
        throw RankGapError(msg.str(), std::vector<double>(sv.data(), sv.data() + d));
      }
      cols.col(filled++) = cand / norm;
    }
    if (filled != d)
      throw RankGapError("extend_vertical_bundle: rank defect after completion",
                         std::vector<double>(sv.data(), sv.data() + d));
    wtilde[k] = cols;
  }

  // Two-sided limit check: the bases entering a completion node from the
  // left and from the right must agree.
  for (int k : completion_nodes) {
    if (k == 0 || k + 1 >= n) continue;
    const Mat residual =
        wtilde[k + 1] - wtilde[k - 1] * (wtilde[k - 1].transpose() * wtilde[k + 1]);
    const double gap = detail::matrix_singular_values(residual)[0];
    if (gap > 1e-4) {
      std::ostringstream msg;
      msg << "extend_vertical_bundle: left/right limits disagree at a singular time (angle "
          << gap << ")";
      throw RankGapError(msg.str(), {gap});
    }
  }
  return wtilde;
}

TransversalSystem build_transversal_system(const GeodesicTrace& geodesic,
                                           const FoliationSpec& foliation,
                                           const NumericParams& params) {
  TransversalSystem sys;
  sys.vertical = vertical_jacobi_basis(geodesic, foliation, params);
  const int n = sys.vertical.frame_trace.geodesic.nodes();
  const int m = foliation.parent->dimension() - 1;
  const int d = sys.vertical.vertical_rank;
  sys.h_dim = m - d;
  sys.wtilde = extend_vertical_bundle(sys.vertical, params);

  // Node-to-node continuity of the extended bundle.
  for (int k = 1; k < n; ++k)
    sys.max_wtilde_jump = std::max(sys.max_wtilde_jump, span_gap(sys.wtilde[k - 1], sys.wtilde[k]));

  // H-frame: seed at node 0 by completing W~(0), then propagate by
  // projection and re-orthonormalization with sign matching.
  sys.h_frame.assign(n, Mat(m, sys.h_dim));
  if (sys.h_dim > 0) {
    {
      Mat h0(m, sys.h_dim);
      int filled = 0;
      for (int j = 0; j < m && filled < sys.h_dim; ++j) {
        Vec cand = Vec::Unit(m, j);
        if (d > 0) cand -= sys.wtilde[0] * (sys.wtilde[0].transpose() * cand);
        for (int i = 0; i < filled; ++i) cand -= h0.col(i).dot(cand) * h0.col(i);
        const double norm = cand.norm();
        if (norm > 1e-6) h0.col(filled++) = cand / norm;
      }
      if (filled != sys.h_dim)
        throw RankGapError("transversal system: could not seed the H-frame", {});
      sys.h_frame[0] = h0;
    }
    for (int k = 1; k < n; ++k) {
      Mat hk = sys.h_frame[k - 1];
      if (d > 0) hk -= sys.wtilde[k] * (sys.wtilde[k].transpose() * hk);
      // Gram-Schmidt with sign matching against the previous node.
      for (int j = 0; j < sys.h_dim; ++j) {
        Vec col = hk.col(j);
        for (int i = 0; i < j; ++i) col -= hk.col(i).dot(col) * hk.col(i);
        const double norm = col.norm();
        if (norm < 1e-8)
          throw RankGapError("transversal system: H-frame propagation degenerated", {norm});
        col /= norm;
        if (col.dot(sys.h_frame[k - 1].col(j)) < 0.0) col = -col;
        hk.col(j) = col;
      }
      sys.h_frame[k] = hk;
    }
  }

  // A-tensor and R^H per node.
  double scale = 0.0;
  for (int k = 0; k < n; ++k)
    if (d > 0) scale = std::max(scale, detail::matrix_singular_values(sys.vertical.value[k])[0]);
  sys.a_tensor.assign(n, Mat::Zero(sys.h_dim, d));
  sys.r_h.assign(n, Mat::Zero(sys.h_dim, sys.h_dim));
  for (int k = 0; k < n; ++k) {
    if (sys.h_dim == 0) continue;
    if (d > 0) {
      const Eigen::JacobiSVD<Mat> svd(sys.vertical.value[k],
                                      Eigen::ComputeThinU | Eigen::ComputeThinV);
      const Vec sv = svd.singularValues();
      Mat a = Mat::Zero(sys.h_dim, d);
      for (int i = 0; i < d; ++i) {
        if (sv[i] <= kCompletionSwitch * scale) continue;  // A(DJ) = 0 when J vanishes
        const Vec image = sys.h_frame[k].transpose() *
                          (sys.vertical.derivative[k] * svd.matrixV().col(i)) / sv[i];
        // Column of A in the W~ basis: svd.matrixU().col(i) is the i-th
        // W~ column direction; map through the stored W~ ordering.
        const Vec coeffs = sys.wtilde[k].transpose() * svd.matrixU().col(i);
        a += image * coeffs.transpose();
      }
      sys.a_tensor[k] = a;
    }
    Mat rh = sys.h_frame[k].transpose() * sys.vertical.frame_trace.curvature[k] *
             sys.h_frame[k];
    if (d > 0) rh += 3.0 * sys.a_tensor[k] * sys.a_tensor[k].transpose();
    sys.max_rh_asymmetry =
        std::max(sys.max_rh_asymmetry, (rh - rh.transpose()).cwiseAbs().maxCoeff());
    sys.r_h[k] = 0.5 * (rh + rh.transpose());
  }
  if (sys.max_rh_asymmetry > 1e-8)
    throw RankGapError("transversal system: R^H asymmetry exceeds 1e-8",
                       {sys.max_rh_asymmetry});
  return sys;
}

Vec a_tensor_at(const TransversalSystem& system, int node, const Vec& w_coeffs) {
  return system.a_tensor[node] * w_coeffs;
}

Vec transversal_curvature_at(const TransversalSystem& system, int node, const Vec& y_coeffs) {
  return system.r_h[node] * y_coeffs;
}

double a_adjoint_defect(const TransversalSystem& system, Rng& rng, int samples) {
  const int n = static_cast<int>(system.a_tensor.size());
  const int d = system.vertical.vertical_rank;
  if (system.h_dim == 0 || d == 0) return 0.0;
  double defect = 0.0;
  for (int s = 0; s < samples; ++s) {
    const int k = static_cast<int>(rng.uniform(0.0, 1.0) * n) % n;
    const Vec w = rng.gaussian_vector(d);
    const Vec h = rng.gaussian_vector(system.h_dim);
    const double lhs = (system.a_tensor[k] * w).dot(h);
    const double rhs = w.dot(system.a_tensor[k].transpose() * h);
    defect = std::max(defect, std::abs(lhs - rhs));
  }
  return defect;
}

namespace {

// Choose a complement of W inside Lambda^L by coefficient vectors: columns
// C with span(C) complementary to the W-combination coefficients G, where
// Lambda_phase * G = W_phase in the (value, derivative) phase space at t=0.
// The Lambda data must already be expressed in the vertical trace's frame.
Mat complement_coefficients(const Mat& lambda_value0, const Mat& lambda_deriv0,
                            const VerticalJacobiTrace& vertical, Rng* rng) {
  const int m = static_cast<int>(lambda_value0.rows());
  const int d = vertical.vertical_rank;
  Mat lambda_phase(2 * m, m), w_phase(2 * m, d);
  lambda_phase.topRows(m) = lambda_value0;
  lambda_phase.bottomRows(m) = lambda_deriv0;
  w_phase.topRows(m) = vertical.value[0];
  w_phase.bottomRows(m) = vertical.derivative[0];

  Mat g(m, d);
  if (d > 0) {
    g = lambda_phase.colPivHouseholderQr().solve(w_phase);
    const double residual = (lambda_phase * g - w_phase).cwiseAbs().maxCoeff();
    if (residual > 1e-6)
      throw ConstructionError(
          "horizontal_index: vertical fields are not L-Jacobi fields of the patch");
  }

  // Orthonormal basis of the complement of span(g) in R^m.
  Mat c(m, m - d);
  int filled = 0;
  Mat gq(m, d);
  if (d > 0) {
    Eigen::HouseholderQR<Mat> qr(g);
    gq = qr.householderQ() * Mat::Identity(m, d);
  }
  for (int j = 0; j < m && filled < m - d; ++j) {
    Vec cand = rng ? rng->gaussian_vector(m) : Vec(Vec::Unit(m, j));
    if (d > 0) cand -= gq * (gq.transpose() * cand);
    for (int i = 0; i < filled; ++i) cand -= c.col(i).dot(cand) * c.col(i);
    const double norm = cand.norm();
    if (norm > 1e-6) c.col(filled++) = cand / norm;
  }
  if (filled != m - d)
    throw ConstructionError("horizontal_index: failed to build a complement of W");
  if (rng) {
    // Mix in W-combination components; the index must not change.
    for (int j = 0; j < m - d && d > 0; ++j) c.col(j) += g * rng->gaussian_vector(d) * 0.5;
  }
  return c;
}

}  // namespace

int horizontal_index(const SubmanifoldPatch& patch, const Vec& u, const Vec& coeffs,
                     const FoliationSpec& foliation, const NumericParams& params,
                     Rng* complement_rng) {
  // The patch must be a regular leaf of the foliation at the start point.
  const Vec start = patch.point_at(u);
  if (foliation.leaf_dim(start) != patch.leaf_dimension)
    throw DomainError("horizontal_index: patch is not a regular leaf of the foliation");

  const JacobiBasisTrace lambda = jacobi_basis(patch, u, coeffs, 1.0, params);
  const TransversalSystem sys = build_transversal_system(lambda.geodesic, foliation, params);
  if (sys.h_dim == 0) return 0;

  const int n = lambda.geodesic.nodes();
  const int m = lambda.basis_count;
  const int d = sys.vertical.vertical_rank;
  const int c_dim = m - d;

  // The Lambda basis and the transversal system ride on different parallel
  // frames of the same normal bundle; they differ by a constant orthogonal
  // change of coordinates, read off at the starting node.
  const RiemannianSpace& sp = *patch.parent;
  const Vec& p0 = lambda.geodesic.position[0];
  Mat q(m, m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      q(a, b) = sp.inner(p0, sys.vertical.frame_trace.frame[0].col(a), lambda.frame[0].col(b));

  const Mat lambda_value0 = q * lambda.value[0];
  const Mat lambda_deriv0 = q * lambda.derivative[0];
  const Mat c = complement_coefficients(lambda_value0, lambda_deriv0, sys.vertical,
                                        complement_rng);

  // Initial data of the H-projections: z = H^T y, and the transversal
  // derivative carries the A-correction for the vertical part of the value.
  Mat z0 = sys.h_frame[0].transpose() * (lambda_value0 * c);
  Mat zd0 = sys.h_frame[0].transpose() * (lambda_deriv0 * c);
  if (d > 0)
    zd0 -= sys.a_tensor[0] * (sys.wtilde[0].transpose() * (lambda_value0 * c));

  // Integrate Z'' + R^H Z = 0 on the grid (RK4 with midpoint-interpolated
  // coefficients), recording values and derivatives per node.
  TransversalSolution sol;
  sol.times = lambda.geodesic.times;
  sol.value.assign(n, Mat(sys.h_dim, c_dim));
  sol.derivative.assign(n, Mat(sys.h_dim, c_dim));
  sol.value[0] = z0;
  sol.derivative[0] = zd0;
  Mat z = z0, zd = zd0;
  for (int k = 0; k + 1 < n; ++k) {
    const double dt = sol.times[k + 1] - sol.times[k];
    const Mat& r0 = sys.r_h[k];
    const Mat rm = 0.5 * (sys.r_h[k] + sys.r_h[k + 1]);
    const Mat& r1 = sys.r_h[k + 1];
    const Mat k1v = zd, k1d = -r0 * z;
    const Mat k2v = zd + 0.5 * dt * k1d, k2d = -rm * (z + 0.5 * dt * k1v);
    const Mat k3v = zd + 0.5 * dt * k2d, k3d = -rm * (z + 0.5 * dt * k2v);
    const Mat k4v = zd + dt * k3d, k4d = -r1 * (z + dt * k3v);
    z += dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    zd += dt / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d);
    sol.value[k + 1] = z;
    sol.derivative[k + 1] = zd;
  }

  const auto drops = detail::scan_rank_drops(sol.times, sol.value, sol.derivative, 0.0,
                                             1.0 - params.endpoint_tol, params);
  int total = 0;
  for (const auto& drop : drops) total += drop.corank;
  return total;
}

SplitReport verify_index_splitting(const SubmanifoldPatch& patch, const Vec& u, const Vec& coeffs,
                                   const FoliationSpec& foliation,
                                   const NumericParams& params) {
  const JacobiBasisTrace lambda = jacobi_basis(patch, u, coeffs, 1.0, params);
  const auto records = detect_focal(lambda, 0.0, 1.0, params);
  if (nullity_at_endpoint(records, 1.0, params) > 0)
    throw DomainError("verify_index_splitting: endpoint is focal; move the endpoint");

  SplitReport report;
  report.ind_total = morse_index(records, 1.0, params);
  report.ind_vertical = w_focal_index(lambda.geodesic, foliation, params);
  report.ind_horizontal = horizontal_index(patch, u, coeffs, foliation, params);
  report.holds = report.ind_total == report.ind_vertical + report.ind_horizontal;
  return report;
}

}  // namespace ff
