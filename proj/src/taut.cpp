#include "focalforge/taut.hpp"

#include "rank_scan.hpp"
#include "rk45.hpp"
#include "shooting_internal.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <sstream>
#include <thread>

namespace ff {

namespace {

int worker_count() {
  if (const char* env = std::getenv("FOCAL_FORGE_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

// Order-preserving parallel map over [0, n); results land in caller slots.
void parallel_for(long n, const std::function<void(long)>& body) {
  const int workers = std::min<long>(worker_count(), n);
  if (workers <= 1) {
    for (long i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::atomic<long> next{0};
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (long i = next.fetch_add(1); i < n; i = next.fetch_add(1)) body(i);
    });
  for (auto& t : pool) t.join();
}

struct NewtonOutcome {
  bool converged = false;
  Vec u, c;
  double residual = 0.0;
};

NewtonOutcome newton_refine(const SubmanifoldPatch& patch, const Vec& target, Vec u, Vec c,
                            double energy_cap, const NumericParams& params) {
  NewtonOutcome out;
  const RiemannianSpace& sp = *patch.parent;
  double res = std::numeric_limits<double>::infinity();
  const int iter_cap = std::min(params.max_newton_iter, 25);
  for (int iter = 0; iter < iter_cap; ++iter) {
    if (c.squaredNorm() > 1.8 * energy_cap || c.norm() < 1e-8) return out;
    JacobiBasisTrace basis;
    try {
      basis = jacobi_basis(patch, u, c, 1.0, params, /*dense=*/false);
    } catch (const std::exception&) {
      return out;
    }
    const Vec f = basis.geodesic.position.back() - target;
    res = f.norm();
    if (res < params.newton_tol * (1.0 + target.norm())) {
      out.converged = true;
      out.u = u;
      out.c = c;
      out.residual = res;
      return out;
    }
    const Mat jac = detail::shooting_jacobian(patch, u, c, basis);
    Vec step = jac.colPivHouseholderQr().solve(-f);
    if (!step.allFinite()) return out;
    // Trust region: near conjugate points the Jacobian degenerates and the
    // raw Gauss-Newton step can be arbitrarily large.
    const double trust = 0.5 * (1.0 + c.norm());
    if (step.norm() > trust) step *= trust / step.norm();
    // Damped acceptance on the endpoint residual.
    double lambda = 1.0;
    bool accepted = false;
    for (int back = 0; back < 4; ++back) {
      Vec u_try = u + lambda * step.head(u.size());
      Vec c_try = c + lambda * step.tail(c.size());
      if (c_try.norm() < 1e-8 || c_try.squaredNorm() > 2.0 * energy_cap + 4.0) {
        lambda *= 0.5;
        continue;
      }
      try {
        const Vec endpoint =
            detail::geodesic_endpoint(sp, patch.point_at(u_try), patch.normal_vector(u_try, c_try), params);
        if ((endpoint - target).norm() < res * (1.0 - 0.25 * lambda) + 1e-15) {
          u = u_try;
          c = c_try;
          accepted = true;
          break;
        }
      } catch (const std::exception&) {
      }
      lambda *= 0.5;
    }
    if (!accepted) return out;
  }
  return out;
}

// Deterministic direction grids on the unit sphere of normal coefficients.
std::vector<Vec> direction_grid(int k, int density) {
  std::vector<Vec> dirs;
  if (k == 1) {
    dirs.push_back(Vec::Constant(1, 1.0));
    dirs.push_back(Vec::Constant(1, -1.0));
  } else if (k == 2) {
    const int n = std::max(8, density);
    for (int i = 0; i < n; ++i) {
      const double a = 2.0 * M_PI * i / n;
      dirs.push_back(Vec{{std::cos(a), std::sin(a)}});
    }
  } else if (k == 3) {
    const int n = std::max(16, 2 * density);  // Fibonacci sphere
    const double golden = M_PI * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < n; ++i) {
      const double z = 1.0 - 2.0 * (i + 0.5) / n;
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double a = golden * i;
      dirs.push_back(Vec{{r * std::cos(a), r * std::sin(a), z}});
    }
  } else {
    throw DomainError("shoot_critical_points: normal rank > 3 not supported by the seed grid");
  }
  return dirs;
}

std::vector<Vec> parameter_grid(const SubmanifoldPatch& patch, int density) {
  const int ell = patch.leaf_dimension;
  std::vector<Vec> params;
  if (ell == 0) {
    params.push_back(Vec(0));
    return params;
  }
  std::vector<int> counts(ell);
  for (int a = 0; a < ell; ++a) counts[a] = a == 0 ? std::max(6, density) : std::max(4, density / 2);
  std::vector<int> idx(ell, 0);
  while (true) {
    Vec u(ell);
    for (int a = 0; a < ell; ++a) {
      const double span = patch.param_hi[a] - patch.param_lo[a];
      const double frac =
          patch.param_periodic[a] ? (idx[a] + 0.0) / counts[a] : (idx[a] + 0.5) / counts[a];
      u[a] = patch.param_lo[a] + span * frac;
    }
    params.push_back(u);
    int a = 0;
    while (a < ell && ++idx[a] == counts[a]) idx[a++] = 0;
    if (a == ell) break;
  }
  return params;
}

bool lexicographic_less(const Vec& a, const Vec& b) {
  for (int i = 0; i < a.size() && i < b.size(); ++i) {
    if (a[i] < b[i] - 1e-12) return true;
    if (a[i] > b[i] + 1e-12) return false;
  }
  return a.size() < b.size();
}

}  // namespace

std::vector<CriticalPoint> shoot_critical_points(const SubmanifoldPatch& patch, const Vec& target,
                                                 double energy_cap, int grid_density,
                                                 const NumericParams& params,
                                                 ShootingDiagnostics* diagnostics) {
  if (!(energy_cap > 0.0) || !std::isfinite(energy_cap))
    throw DomainError("shoot_critical_points: energy cap must be finite and positive");
  const RiemannianSpace& sp = *patch.parent;
  ShootingDiagnostics diag;

  const std::vector<Vec> us = parameter_grid(patch, grid_density);
  for (const Vec& u : us)
    if ((patch.point_at(u) - target).norm() < 1e-9)
      throw DomainError("shoot_critical_points: target lies on the patch");

  const std::vector<Vec> dirs = direction_grid(patch.normal_rank(), grid_density);
  const int n_len = std::max(6, grid_density / 2);
  const double sqrt_cap = std::sqrt(energy_cap);
  const double dl = sqrt_cap / n_len;
  const double filter_radius = std::max(0.75, 1.6 * dl);

  struct Seed {
    Vec u, c;
  };
  std::vector<Seed> seeds;
  for (const Vec& u : us)
    for (const Vec& dir : dirs)
      for (int i = 0; i < n_len; ++i) seeds.push_back({u, (i + 0.5) * dl * dir});
  diag.seeds = static_cast<long>(seeds.size());

  NumericParams filter_params = params;
  filter_params.ode_tol = std::max(params.ode_tol, 1e-7);
  std::vector<std::optional<NewtonOutcome>> slots(seeds.size());
  std::vector<char> filtered(seeds.size(), 0);
  parallel_for(static_cast<long>(seeds.size()), [&](long i) {
    const Seed& seed = seeds[i];
    try {
      const Vec endpoint = detail::geodesic_endpoint(sp, patch.point_at(seed.u),
                                             patch.normal_vector(seed.u, seed.c), filter_params);
      if ((endpoint - target).norm() > filter_radius) {
        filtered[i] = 1;
        return;
      }
      const NewtonOutcome outcome =
          newton_refine(patch, target, seed.u, seed.c, energy_cap, params);
      if (outcome.converged) slots[i] = outcome;
    } catch (const std::exception&) {
    }
  });

  // Deterministic merge and normal-bundle dedup.
  std::vector<CriticalPoint> accepted;
  std::vector<std::pair<Vec, Vec>> embeddings;  // (foot point, ambient normal vector)
  for (size_t i = 0; i < slots.size(); ++i) {
    if (filtered[i]) {
      ++diag.filtered;
      continue;
    }
    if (!slots[i]) {
      ++diag.diverged;
      continue;
    }
    ++diag.converged;
    const NewtonOutcome& out = *slots[i];
    if (out.c.squaredNorm() > energy_cap * (1.0 + 1e-9)) continue;
    const Vec foot = patch.point_at(out.u);
    const Vec normal = patch.normal_vector(out.u, out.c);
    bool duplicate = false;
    for (size_t j = 0; j < embeddings.size(); ++j) {
      const double dist =
          (embeddings[j].first - foot).norm() + (embeddings[j].second - normal).norm();
      if (dist < params.dedup_tol) {
        duplicate = true;
        if (out.residual < accepted[j].residual) {
          accepted[j].parameter = out.u;
          accepted[j].coeffs = out.c;
          accepted[j].residual = out.residual;
        }
        break;
      }
    }
    if (duplicate) {
      ++diag.duplicates;
      continue;
    }
    CriticalPoint cp;
    cp.parameter = out.u;
    cp.coeffs = out.c;
    cp.residual = out.residual;
    cp.energy = out.c.squaredNorm();
    accepted.push_back(std::move(cp));
    embeddings.emplace_back(foot, normal);
  }

  // Focal data from a dense re-integration.
  for (CriticalPoint& cp : accepted) {
    const JacobiBasisTrace basis = jacobi_basis(patch, cp.parameter, cp.coeffs, 1.0, params);
    cp.records = detect_focal(basis, 0.0, 1.0, params);
    cp.index = morse_index(cp.records, 1.0, params);
    cp.nullity = nullity_at_endpoint(cp.records, 1.0, params);
    cp.energy = cp.coeffs.squaredNorm();
  }

  std::sort(accepted.begin(), accepted.end(), [&](const CriticalPoint& a, const CriticalPoint& b) {
    if (std::abs(a.energy - b.energy) > 1e-10) return a.energy < b.energy;
    const Vec va = patch.normal_vector(a.parameter, a.coeffs);
    const Vec vb = patch.normal_vector(b.parameter, b.coeffs);
    return lexicographic_less(va, vb);
  });
  if (diagnostics) *diagnostics = diag;
  return accepted;
}

std::vector<int> morse_polynomial(const std::vector<CriticalPoint>& criticals) {
  int max_index = -1;
  for (const CriticalPoint& cp : criticals) max_index = std::max(max_index, cp.index);
  std::vector<int> coeffs(max_index + 1, 0);
  for (const CriticalPoint& cp : criticals) coeffs[cp.index] += 1;
  return coeffs;
}

namespace {

// Closed-form geodesic enumeration for a point source on the round
// n-sphere: one geodesic of index k (n-1) for every k >= 0.
std::vector<int> loop_space_ranks(int n, int max_degree) {
  std::vector<int> ranks(max_degree + 1, 0);
  for (int k = 0;; ++k) {
    const int idx = k * (n - 1);
    if (idx > max_degree) break;
    ranks[idx] += 1;
    if (n == 1) break;
  }
  return ranks;
}

// Foot-point enumeration for a round hypersphere in Euclidean space: two
// critical points, of index 0 and index n.
std::vector<int> hypersphere_ranks(int n, int max_degree) {
  std::vector<int> ranks(max_degree + 1, 0);
  ranks[0] = 1;
  if (n <= max_degree) ranks[n] += 1;
  return ranks;
}

}  // namespace

BettiTable reference_betti(const std::string& scenario_id, int max_degree) {
  if (max_degree < 0) throw DomainError("reference_betti: max_degree must be non-negative");
  BettiTable table;
  table.scenario = scenario_id;
  table.field = "Z2";
  if (scenario_id == "omega-s2" || scenario_id == "omega-s3" || scenario_id == "omega-s4") {
    const int n = scenario_id.back() - '0';
    table.ranks = loop_space_ranks(n, max_degree);
    table.provenance =
        "generated: closed-form great-circle enumeration, one geodesic of index k(n-1) per k";
    return table;
  }
  if (scenario_id == "hopf-fiber") {
    table.ranks = loop_space_ranks(2, max_degree);
    table.provenance =
        "generated: horizontal-lift enumeration over the base 2-sphere, one geodesic per index";
    return table;
  }
  if (scenario_id == "s1-in-r2") {
    table.ranks = hypersphere_ranks(1, max_degree);
    table.provenance = "generated: foot-point enumeration of the squared distance on the circle";
    return table;
  }
  if (scenario_id == "s2-in-r3") {
    table.ranks = hypersphere_ranks(2, max_degree);
    table.provenance = "generated: foot-point enumeration of the squared distance on the sphere";
    return table;
  }
  if (scenario_id == "hyperplane") {
    table.ranks.assign(max_degree + 1, 0);
    table.ranks[0] = 1;
    table.provenance = "generated: unique foot point of an affine subspace";
    return table;
  }
  if (scenario_id.rfind("lens(", 0) == 0) {
    int p = 0, q = 0;
    if (std::sscanf(scenario_id.c_str(), "lens(%d,%d)", &p, &q) != 2 || p <= 0)
      throw DomainError("reference_betti: malformed lens-space id '" + scenario_id + "'");
    if (scenario_id.size() >= 3 && scenario_id.substr(scenario_id.size() - 3) == "-z2") {
      if (p % 2 == 0)
        throw DomainError("reference_betti: Z2 lens-space row is bundled for odd p only");
      table.ranks.assign(max_degree + 1, 0);
      table.ranks[0] = 1;
      if (max_degree >= 3) table.ranks[3] = 1;
      table.provenance =
          "transcribed: lens space L(p,q) with Z2 coefficients, p odd; degrees 1 and 2 vanish";
      return table;
    }
    if (scenario_id.size() >= 3 && scenario_id.substr(scenario_id.size() - 3) == "-zp") {
      table.field = "Zp";
      table.ranks.assign(max_degree + 1, 0);
      for (int d = 0; d <= std::min(3, max_degree); ++d) table.ranks[d] = 1;
      table.provenance = "transcribed: lens space L(p,q) with Z_p coefficients, rank 1 in 0..3";
      return table;
    }
  }
  throw DomainError("reference_betti: unknown scenario id '" + scenario_id + "'");
}

PerfectnessVerdict perfectness_verdict(const std::vector<CriticalPoint>& criticals,
                                       const BettiTable& reference, double energy_cap,
                                       const NumericParams&) {
  for (const CriticalPoint& cp : criticals) {
    if (cp.nullity > 0)
      throw DomainError("perfectness_verdict: non-generic target (focal endpoint)");
    for (const FocalRecord& rec : cp.records)
      if (std::abs(rec.time - 1.0) < 1e-4)
        throw DomainError("perfectness_verdict: non-generic target (focal time near 1)");
  }

  PerfectnessVerdict verdict;
  // Reliable degree: every critical point of index <= k must sit below
  // cap * (1 - margin); a deeper geodesic may have been truncated.
  const double margin = 0.05;
  int reliable = std::numeric_limits<int>::max();
  int max_index = -1;
  for (const CriticalPoint& cp : criticals) {
    max_index = std::max(max_index, cp.index);
    if (cp.energy > energy_cap * (1.0 - margin)) reliable = std::min(reliable, cp.index - 1);
  }
  if (reliable == std::numeric_limits<int>::max()) reliable = max_index;
  verdict.reliable_degree = reliable;

  const std::vector<int> poly = morse_polynomial(criticals);
  const int degrees = static_cast<int>(reference.ranks.size());
  for (int d = 0; d < degrees; ++d) {
    const int count = d < static_cast<int>(poly.size()) ? poly[d] : 0;
    if (count != reference.ranks[d]) {
      verdict.mismatch_degrees.push_back(d);
      if (d > reliable) {
        std::ostringstream hint;
        hint << "degree " << d << ": cap too low to enumerate index-" << d << " geodesics";
        verdict.hints.push_back(hint.str());
      }
    }
  }
  verdict.perfect = verdict.mismatch_degrees.empty();
  return verdict;
}

FiberProbeReport fiber_integrability_probe(const SubmanifoldPatch& patch, const Vec& u,
                                           const Vec& coeffs, int sample_count, double tol,
                                           Rng& rng, const NumericParams& params) {
  FiberProbeReport report;
  const int ell = patch.leaf_dimension;
  const int k = patch.normal_rank();
  const int n = ell + k;

  const JacobiBasisTrace basis = jacobi_basis(patch, u, coeffs, 1.0, params);
  const auto records = detect_focal(basis, 0.0, 1.0, params);
  report.nullity = nullity_at_endpoint(records, 1.0, params);
  if (report.nullity == 0)
    throw DomainError("fiber_integrability_probe: vector is not focal at the endpoint");
  const Vec target = basis.geodesic.position.back();
  const int mu = report.nullity;

  // Chart coordinates x = (u, c).
  Vec x0(n);
  x0.head(ell) = u;
  x0.tail(k) = coeffs;
  const double radius = params.probe_radius * std::max(1.0, coeffs.norm());

  std::vector<Vec> cloud;
  for (int s = 0; s < sample_count; ++s) {
    const Vec seed = x0 + radius * rng.unit_vector(n);
    // Random affine slice of complementary dimension n - mu.
    Mat slice(n, n - mu);
    {
      Mat g(n, n - mu);
      for (int j = 0; j < n - mu; ++j) g.col(j) = rng.gaussian_vector(n);
      Eigen::HouseholderQR<Mat> qr(g);
      slice = qr.householderQ() * Mat::Identity(n, n - mu);
    }
    Vec s_coord = Vec::Zero(n - mu);
    bool ok = false;
    double res = std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < params.max_newton_iter; ++iter) {
      const Vec x = x0 + (seed - x0) + slice * s_coord;
      const Vec u_cur = x.head(ell);
      const Vec c_cur = x.tail(k);
      if (c_cur.norm() < 1e-8) break;
      JacobiBasisTrace b;
      try {
        b = jacobi_basis(patch, u_cur, c_cur, 1.0, params, /*dense=*/false);
      } catch (const std::exception&) {
        break;
      }
      const Vec f = b.geodesic.position.back() - target;
      res = f.norm();
      if (res < 10.0 * params.newton_tol * (1.0 + target.norm())) {
        // Keep the cloud local: the slice may also cut the fiber far from
        // v, where curvature would contaminate the dimension estimate.
        if ((x - x0).norm() <= 3.0 * radius) {
          ok = true;
          cloud.push_back(x);
        }
        break;
      }
      const Mat jac = detail::shooting_jacobian(patch, u_cur, c_cur, b) * slice;
      const Vec step = jac.colPivHouseholderQr().solve(-f);
      if (!step.allFinite() || step.norm() > 10.0 * radius) break;
      s_coord += step;
    }
    (void)ok;
  }
  report.solutions_found = static_cast<int>(cloud.size());
  if (report.solutions_found < std::max(mu + 2, sample_count / 2)) {
    report.inconclusive = true;
    report.note = "insufficient fiber solutions found";
    return report;
  }

  // PCA of the solution cloud in chart coordinates.
  Vec mean = Vec::Zero(n);
  for (const Vec& x : cloud) mean += x;
  mean /= static_cast<double>(cloud.size());
  Mat cov = Mat::Zero(n, n);
  for (const Vec& x : cloud) cov += (x - mean) * (x - mean).transpose();
  cov /= static_cast<double>(cloud.size());
  Eigen::SelfAdjointEigenSolver<Mat> eig(cov);
  Vec evals = eig.eigenvalues().reverse();
  report.pca_eigenvalues.assign(evals.data(), evals.data() + n);
  int dim = 0;
  for (int i = 0; i < n; ++i)
    if (evals[i] > evals[0] / params.pca_gap) ++dim;
  report.fiber_dim = dim;

  // Tangent fit: top-mu principal directions.
  Mat fit(n, mu);
  for (int j = 0; j < mu; ++j) fit.col(j) = eig.eigenvectors().col(n - 1 - j);

  // Kernel of d exp_perp at cloud points vs the tangent fit.
  double tangency = 0.0;
  const int checks = std::min<int>(6, static_cast<int>(cloud.size()));
  for (int i = 0; i < checks; ++i) {
    const Vec& x = cloud[i];
    JacobiBasisTrace b = jacobi_basis(patch, x.head(ell), x.tail(k), 1.0, params, false);
    const Mat jac = detail::shooting_jacobian(patch, x.head(ell), x.tail(k), b);
    Eigen::JacobiSVD<Mat> svd(jac, Eigen::ComputeFullV);
    const Vec sv = svd.singularValues();
    if (n - mu - 1 >= 0 && sv[n - mu - 1] < params.sv_gap * sv[n - mu])
      report.note = "kernel gap marginal at a cloud point";
    Mat kernel(n, mu);
    for (int j = 0; j < mu; ++j) kernel.col(j) = svd.matrixV().col(n - 1 - j);
    const Mat residual = kernel - fit * (fit.transpose() * kernel);
    tangency = std::max(tangency, detail::matrix_singular_values(residual)[0]);
  }
  report.tangency_residual = tangency;
  report.integrable = (report.fiber_dim == mu) && (tangency < tol);
  return report;
}

MorseBottReport morse_bott_probe(const SubmanifoldPatch& patch, const Vec& target,
                                 double energy_cap, int max_samples, Rng& rng,
                                 const NumericParams& params) {
  MorseBottReport report;
  const std::vector<CriticalPoint> criticals =
      shoot_critical_points(patch, target, energy_cap, 24, params);
  std::vector<CriticalPoint> degenerate;
  for (const CriticalPoint& cp : criticals)
    if (cp.nullity > 0) degenerate.push_back(cp);
  if (degenerate.empty()) {
    report.degenerate_to_morse = true;
    report.nullity_matches = true;
    report.index_constant = true;
    return report;
  }
  const int stride = std::max<int>(1, static_cast<int>(degenerate.size()) / max_samples);
  for (size_t i = 0; i < degenerate.size() && report.sampled.size() < size_t(max_samples);
       i += stride)
    report.sampled.push_back(degenerate[i]);

  // Index and nullity must be constant along each connected component;
  // components are separated by their critical energy.
  bool nullity_ok = true, index_ok = true;
  for (const CriticalPoint& cp : report.sampled) {
    for (const CriticalPoint& other : report.sampled)
      if (std::abs(cp.energy - other.energy) < 1e-6 * (1.0 + cp.energy))
        index_ok = index_ok && (cp.index == other.index) && (cp.nullity == other.nullity);
    const FiberProbeReport probe =
        fiber_integrability_probe(patch, cp.parameter, cp.coeffs, 12, 0.1, rng, params);
    report.fiber_dims.push_back(probe.fiber_dim);
    nullity_ok = nullity_ok && !probe.inconclusive && (probe.fiber_dim == cp.nullity);
  }
  report.nullity_matches = nullity_ok;
  report.index_constant = index_ok;
  return report;
}

namespace {
Vec hopf_lift(const Vec& b) {
  // Section of the Hopf map over the 2-sphere of radius 1/2.
  if (b.size() != 3 || std::abs(b.norm() - 0.5) > 1e-7)
    throw DomainError("hopf lift: base point must lie on the sphere of radius 1/2");
  const double s2 = 0.5 + b[0];
  if (s2 > 1e-8) {
    const double s = std::sqrt(s2);
    return Vec{{s, 0.0, b[1] / s, -b[2] / s}};
  }
  const double t = std::sqrt(0.5 - b[0]);
  return Vec{{b[1] / t, b[2] / t, t, 0.0}};
}
}  // namespace

SubmanifoldPatch build_saturated_preimage(const FoliationSpec& foliation,
                                          const Vec& quotient_point) {
  if (foliation.name == "concentric-spheres-r2") {
    if (quotient_point.size() != 1 || quotient_point[0] < 1e-6)
      throw DomainError("saturated preimage: radius must stay inside the regular quotient part");
    return circle_patch(quotient_point[0]);
  }
  if (foliation.name == "concentric-spheres-r3") {
    if (quotient_point.size() != 1 || quotient_point[0] < 1e-6)
      throw DomainError("saturated preimage: radius must stay inside the regular quotient part");
    return sphere_patch(quotient_point[0]);
  }
  if (foliation.name == "circles-x-line") {
    if (quotient_point.size() != 2 || quotient_point[0] < 1e-6)
      throw DomainError("saturated preimage: point touches the singular quotient boundary");
    return circle_in_r3_patch(quotient_point[0], quotient_point[1]);
  }
  if (foliation.name == "hopf") {
    return hopf_fiber_patch(hopf_lift(quotient_point));
  }
  throw ConstructionError("saturated preimage: no construction for foliation '" + foliation.name +
                          "'");
}

}  // namespace ff
