#pragma once

#include "focalforge/foliation.hpp"
#include "focalforge/jacobi.hpp"
#include "focalforge/rng.hpp"

#include <optional>
#include <string>
#include <vector>

namespace ff {

/// A critical point of the energy functional E_q: an L-geodesic from the
/// patch to the target, as a normal vector (parameter + normal
/// coefficients) with its focal data attached.
struct CriticalPoint {
  Vec parameter;
  Vec coeffs;
  double residual = 0.0;  // |exp_perp(v) - q|
  double energy = 0.0;    // |v|^2
  int index = 0;
  int nullity = 0;
  std::vector<FocalRecord> records;
};

struct ShootingDiagnostics {
  long seeds = 0;
  long filtered = 0;    // rejected by the cheap endpoint pre-filter
  long converged = 0;
  long diverged = 0;    // Newton failures (logged, not fatal)
  long duplicates = 0;  // collapsed by the normal-bundle dedup metric
};

/// Enumerate critical points of E_q below the energy cap: seed a grid over
/// (parameter box) x (normal directions) x (lengths), refine by damped
/// Gauss-Newton on v -> exp_perp(v) - q with the Jacobi-based derivative,
/// deduplicate by normal-bundle distance, and attach index/nullity from a
/// dense re-integration. Result sorted by (energy, lexicographic v).
std::vector<CriticalPoint> shoot_critical_points(const SubmanifoldPatch& patch, const Vec& target,
                                                 double energy_cap, int grid_density = 24,
                                                 const NumericParams& params = {},
                                                 ShootingDiagnostics* diagnostics = nullptr);

/// coefficient[k] = number of critical points of index k.
std::vector<int> morse_polynomial(const std::vector<CriticalPoint>& criticals);

/// Reference Betti data for a named scenario, with provenance.
struct BettiTable {
  std::string scenario;
  std::string field;  // coefficient field tag, e.g. "Z2", "Zp"
  std::vector<int> ranks;
  std::string provenance;
};

/// Bundled reference tables. Loop-space rows for sphere scenarios are
/// generated by the closed-form geodesic-enumeration oracle; lens-space
/// rows are transcribed reference values. Unknown ids raise DomainError.
/// Ids: omega-s2, omega-s3, omega-s4, s1-in-r2, s2-in-r3, hopf-fiber,
/// hyperplane, lens(p,q)-z2 (p odd), lens(p,q)-zp.
BettiTable reference_betti(const std::string& scenario_id, int max_degree);

struct PerfectnessVerdict {
  bool perfect = false;
  int reliable_degree = 0;
  std::vector<int> mismatch_degrees;
  std::vector<std::string> hints;  // "cap too low" notes for unreliable degrees
};

struct MorseReport {
  Vec target;
  double energy_cap = 0.0;
  std::vector<CriticalPoint> criticals;
  std::vector<int> polynomial;
  BettiTable reference;
  PerfectnessVerdict verdict;
  bool generic = true;  // all nullities zero and focal times clear of t = 1
  ShootingDiagnostics diagnostics;
};

/// Degree-wise comparison of the counting polynomial against the reference
/// table, up to the cap-determined reliable degree (margin 5%). Refuses
/// focal targets ("non-generic target").
PerfectnessVerdict perfectness_verdict(const std::vector<CriticalPoint>& criticals,
                                       const BettiTable& reference, double energy_cap,
                                       const NumericParams& params = {});

struct FiberProbeReport {
  int fiber_dim = -1;
  int nullity = 0;
  double tangency_residual = 0.0;  // max principal-angle sine kernel vs cloud fit
  bool integrable = false;
  bool inconclusive = false;
  std::string note;
  std::vector<double> pca_eigenvalues;
  int solutions_found = 0;
};

/// Probe integrability of the exp_perp fiber through a focal vector: solve
/// exp_perp(w) = q on random affine slices seeded in a ball around v,
/// estimate the local fiber dimension by PCA of the solution cloud, and
/// compare the kernel of d exp_perp with the cloud's tangent fit.
FiberProbeReport fiber_integrability_probe(const SubmanifoldPatch& patch, const Vec& u,
                                           const Vec& coeffs, int sample_count, double tol,
                                           Rng& rng, const NumericParams& params = {});

struct MorseBottReport {
  std::vector<CriticalPoint> sampled;
  std::vector<int> fiber_dims;
  bool nullity_matches = false;
  bool index_constant = false;
  bool degenerate_to_morse = false;  // all nullities zero: plain Morse case
};

/// At a target on a positive-dimensional critical set: check that the
/// nullity equals the critical-manifold dimension (via the fiber probe) and
/// that the index is constant along the sampled component.
MorseBottReport morse_bott_probe(const SubmanifoldPatch& patch, const Vec& target,
                                 double energy_cap, int max_samples, Rng& rng,
                                 const NumericParams& params = {});

/// Saturated preimage of a quotient point: the leaf patch over it. The
/// point must lie in the regular part of the quotient interior.
SubmanifoldPatch build_saturated_preimage(const FoliationSpec& foliation,
                                          const Vec& quotient_point);

}  // namespace ff
