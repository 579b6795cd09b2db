#pragma once

#include "focalforge/geodesic.hpp"

#include <optional>
#include <string>
#include <vector>

namespace ff {

/// One focal time with multiplicity and the singular-value diagnostics that
/// justified the corank call. `regular` is the detection-level proxy for
/// membership in C_R (simple crossing); ray-neighborhood confirmation is
/// done by the profile operations.
struct FocalRecord {
  double time = 0.0;
  int multiplicity = 0;
  double smallest_retained_sv = 0.0;
  double largest_discarded_sv = 0.0;
  bool regular = false;
};

/// Matrix solution of the Jacobi equation with L-Jacobi initial conditions
/// along one normal geodesic, expressed in a parallel orthonormal frame of
/// the normal space of the velocity. Columns 0..ell-1 are tangent-seeded
/// (J(0) = t_i, DJ(0) = -S_v t_i), the rest normal-seeded (J(0) = 0,
/// DJ(0) = n_j with n_j orthogonal to v).
struct JacobiBasisTrace {
  GeodesicTrace geodesic;
  int basis_count = 0;    // m = dim - 1
  int tangent_seeded = 0; // = leaf dimension of the source patch
  std::vector<Mat> frame;      // per node: embedding x m parallel frame
  std::vector<Mat> value;      // per node: m x m J(t)
  std::vector<Mat> derivative; // per node: m x m covariant derivative
  std::vector<Mat> curvature;  // per node: m x m frame curvature R~(t)

  Mat value_at(double t) const;
  Mat derivative_at(double t) const;

  /// Max over node pairs of |omega(t) - omega(0)| for the antisymmetric
  /// pairing omega(J_a, J_b) = <DJ_a, J_b> - <J_a, DJ_b>.
  double symplectic_drift() const;

  /// Max residual of the re-derivative check D^2 J + R~ J = 0 on interior
  /// nodes (second central differences of the stored values).
  double jacobi_residual() const;
};

/// Integrate the L-Jacobi basis seeded at patch parameter `u` with normal
/// coefficients `coeffs` (the initial velocity is the corresponding normal
/// vector). The geodesic, a parallel frame, and the m = dim-1 basis fields
/// are integrated together; `dense` = false keeps only the two endpoint
/// nodes (used inside Newton refinements).
JacobiBasisTrace jacobi_basis(const SubmanifoldPatch& patch, const Vec& u, const Vec& coeffs,
                              double horizon = 1.0, const NumericParams& params = {},
                              bool dense = true);

/// Geodesic plus a parallel orthonormal frame of the normal space of its
/// velocity, with the frame curvature matrix R~(t) per node. Building block
/// for vertical/transversal Jacobi machinery that supplies its own fields.
struct FrameTrace {
  GeodesicTrace geodesic;
  std::vector<Mat> frame;      // per node: embedding x m
  std::vector<Mat> curvature;  // per node: m x m symmetric
};

FrameTrace parallel_frame_trace(std::shared_ptr<const RiemannianSpace> space, const Vec& point,
                                const Vec& velocity, double horizon,
                                const NumericParams& params = {});

/// Locate focal times in (t_lo, t_hi] by scanning the smallest singular
/// value of J(t) on the grid, refining by bisection on det / golden-section
/// minimization to params.bisect_tol, and assigning multiplicities by the
/// singular-value gap rule. Throws RankGapError when a corank is ambiguous
/// or when the basis is rank-deficient between records.
std::vector<FocalRecord> detect_focal(const JacobiBasisTrace& basis, double t_lo, double t_hi,
                                      const NumericParams& params = {});

/// Morse index: sum of multiplicities strictly inside (0, open_end),
/// excluding records within params.endpoint_tol of open_end.
int morse_index(const std::vector<FocalRecord>& records, double open_end = 1.0,
                const NumericParams& params = {});

/// Multiplicity at the endpoint (within params.endpoint_tol), else 0.
int nullity_at_endpoint(const std::vector<FocalRecord>& records, double end = 1.0,
                        const NumericParams& params = {});

/// One direction sample of a focal-time profile.
struct FocalProfileEntry {
  Vec parameter;
  Vec direction;       // unit normal coefficients
  double angle = 0.0;  // caller-supplied label (e.g. direction angle)
  std::vector<double> times;
  std::vector<int> multiplicities;
  bool regular_segment = false;  // proxy for membership in nu(L)^R
  bool failed = false;
  std::string error;
};

struct FocalProfile {
  std::vector<FocalProfileEntry> entries;
  double empirical_k = 0.0;  // max |d lambda| / d angle over adjacent samples
  double horizon = 0.0;
};

/// First k focal times per unit-normal sample, with a discrete continuity
/// certificate over adjacent samples. Integration failures are reported per
/// sample and the profile continues.
FocalProfile focal_time_profile(const SubmanifoldPatch& patch,
                                const std::vector<std::pair<Vec, Vec>>& samples, int k,
                                double horizon, const NumericParams& params = {});

}  // namespace ff
