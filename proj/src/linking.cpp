#include "focalforge/linking.hpp"

#include "rank_scan.hpp"
#include "shooting_internal.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ff {

namespace {

std::vector<FocalRecord> interior_records(const SubmanifoldPatch& patch, const Vec& u,
                                          const Vec& coeffs, const NumericParams& params) {
  const JacobiBasisTrace basis = jacobi_basis(patch, u, coeffs, 1.0, params);
  std::vector<FocalRecord> interior;
  for (const FocalRecord& rec : detect_focal(basis, 0.0, 1.0, params))
    if (rec.time < 1.0 - params.endpoint_tol) interior.push_back(rec);
  return interior;
}

// Newton-refined fiber solutions of exp_perp(w) = target near (u0, c0),
// seeded in a chart ball and restricted to random affine slices of
// complementary dimension.
std::vector<std::pair<Vec, Vec>> sample_fiber(const SubmanifoldPatch& patch, const Vec& u0,
                                              const Vec& c0, const Vec& target, int mu, int count,
                                              Rng& rng, const NumericParams& params,
                                              std::vector<std::string>* diagnostics) {
  const int ell = patch.leaf_dimension;
  const int k = patch.normal_rank();
  const int n = ell + k;
  Vec x0(n);
  x0.head(ell) = u0;
  x0.tail(k) = c0;
  const double radius = params.probe_radius * std::max(1.0, c0.norm());

  std::vector<std::pair<Vec, Vec>> solutions;
  const int wanted = std::min(count, params.fiber_sample_cap);
  for (int s = 0; s < 3 * wanted && static_cast<int>(solutions.size()) < wanted; ++s) {
    const Vec seed = x0 + radius * rng.unit_vector(n);
    Mat slice(n, n - mu);
    {
      Mat g(n, n - mu);
      for (int j = 0; j < n - mu; ++j) g.col(j) = rng.gaussian_vector(n);
      Eigen::HouseholderQR<Mat> qr(g);
      slice = qr.householderQ() * Mat::Identity(n, n - mu);
    }
    Vec s_coord = Vec::Zero(n - mu);
    bool converged = false;
    double best = std::numeric_limits<double>::infinity();
    int stalled = 0;
    for (int iter = 0; iter < params.max_newton_iter; ++iter) {
      const Vec x = seed + slice * s_coord;
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
      const double res = f.norm();
      if (res < params.newton_tol * (1.0 + target.norm())) {
        solutions.emplace_back(u_cur, c_cur);
        converged = true;
        break;
      }
      // Stop when the residual stops improving at the integrator floor.
      if (res < 20.0 * params.newton_tol * (1.0 + target.norm()) && res > 0.5 * best) {
        if (++stalled >= 2) {
          solutions.emplace_back(u_cur, c_cur);
          converged = true;
          break;
        }
      }
      best = std::min(best, res);
      const Mat jac = detail::shooting_jacobian(patch, u_cur, c_cur, b) * slice;
      const Vec step = jac.colPivHouseholderQr().solve(-f);
      if (!step.allFinite() || step.norm() > 20.0 * radius) break;
      s_coord += step;
    }
    if (!converged && diagnostics && s >= 3 * wanted - 1)
      diagnostics->push_back("fiber sampling exhausted its retry budget");
  }
  return solutions;
}

struct ZvBuild {
  std::vector<EtaPolygon> polygons;
  int depth = 0;
};

ZvBuild sample_zv_impl(const SubmanifoldPatch& patch, const Vec& u, const Vec& coeffs,
                       int per_level, Rng& rng, const NumericParams& params, int depth,
                       std::vector<std::string>& diagnostics) {
  ZvBuild build;
  const std::vector<FocalRecord> records = interior_records(patch, u, coeffs, params);
  int index = 0;
  for (const FocalRecord& rec : records) index += rec.multiplicity;

  if (index == 0) {
    EtaPolygon poly;
    poly.t = {1.0, 0.0};
    poly.u = {u};
    poly.c = {coeffs};
    poly.norm_v = coeffs.norm();
    build.polygons.push_back(std::move(poly));
    return build;
  }
  if (depth >= params.recursion_cap) {
    diagnostics.push_back("recursion depth cap reached with nonzero index");
    return build;
  }

  const FocalRecord& outer = records.back();
  const double m = outer.time;
  const int mu = outer.multiplicity;
  const Vec c_break = m * coeffs;
  const Vec target =
      detail::geodesic_endpoint(*patch.parent, patch.point_at(u), patch.normal_vector(u, c_break),
                                params);

  auto fiber =
      sample_fiber(patch, u, c_break, target, mu, per_level, rng, params, &diagnostics);
  if (fiber.empty()) {
    diagnostics.push_back("no fiber solutions found at the first focal vector");
    return build;
  }

  const int parent_index = index;
  for (const auto& [uw, cw] : fiber) {
    // Chain consistency: the fiber point has the length of the focal vector.
    if (std::abs(cw.norm() - c_break.norm()) > 1e-8 * std::max(1.0, c_break.norm())) {
      diagnostics.push_back("fiber sample violates the norm chain");
      continue;
    }
    const ZvBuild sub = sample_zv_impl(patch, uw, cw, per_level, rng, params, depth + 1,
                                       diagnostics);
    // Monotone recursion: i(w) < i(v).
    int sub_index = 0;
    for (const FocalRecord& rec : interior_records(patch, uw, cw, params))
      sub_index += rec.multiplicity;
    if (sub_index >= parent_index) {
      diagnostics.push_back("fiber sample fails the index monotonicity i(w) < i(v)");
      continue;
    }
    for (const EtaPolygon& inner : sub.polygons) {
      EtaPolygon poly;
      poly.t.push_back(1.0);
      for (double ti : inner.t) poly.t.push_back(m * ti);
      poly.u.push_back(u);
      poly.c.push_back(coeffs);
      for (size_t i = 0; i < inner.u.size(); ++i) {
        poly.u.push_back(inner.u[i]);
        poly.c.push_back(inner.c[i]);
      }
      // Junction residual at the break: exp-image agreement between the
      // outer focal vector and the fiber point.
      const Vec w_point = detail::geodesic_endpoint(
          *patch.parent, patch.point_at(uw), patch.normal_vector(uw, cw), params);
      poly.junction_residuals.push_back((w_point - target).norm());
      for (double r : inner.junction_residuals) poly.junction_residuals.push_back(r);
      poly.norm_v = coeffs.norm();
      build.polygons.push_back(std::move(poly));
    }
    build.depth = std::max(build.depth, sub.depth + 1);
  }
  return build;
}

bool lexicographic_less(const Vec& a, const Vec& b) {
  for (int i = 0; i < a.size() && i < b.size(); ++i) {
    if (a[i] < b[i] - 1e-12) return true;
    if (a[i] > b[i] + 1e-12) return false;
  }
  return a.size() < b.size();
}

}  // namespace

double first_focal_param(const SubmanifoldPatch& patch, const Vec& u, const Vec& coeffs,
                         const NumericParams& params) {
  if (coeffs.norm() <= 0.0) throw DomainError("first_focal_param: zero normal vector");
  const std::vector<FocalRecord> records = interior_records(patch, u, coeffs, params);
  return records.empty() ? 0.0 : records.back().time;
}

ZvSample sample_Zv(const SubmanifoldPatch& patch, const Vec& u, const Vec& coeffs, int per_level,
                   Rng& rng, const NumericParams& params) {
  ZvSample sample;
  sample.per_level = std::min(per_level, params.fiber_sample_cap);
  sample.depth_cap = params.recursion_cap;
  ZvBuild build =
      sample_zv_impl(patch, u, coeffs, sample.per_level, rng, params, 0, sample.diagnostics);
  sample.depth = build.depth;
  std::sort(build.polygons.begin(), build.polygons.end(),
            [](const EtaPolygon& a, const EtaPolygon& b) {
              if (a.segments() != b.segments()) return a.segments() < b.segments();
              for (size_t i = 0; i < a.t.size() && i < b.t.size(); ++i) {
                if (a.t[i] < b.t[i] - 1e-12) return true;
                if (a.t[i] > b.t[i] + 1e-12) return false;
              }
              for (size_t i = 0; i < a.c.size() && i < b.c.size(); ++i) {
                if (lexicographic_less(a.c[i], b.c[i])) return true;
                if (lexicographic_less(b.c[i], a.c[i])) return false;
              }
              return false;
            });
  sample.polygons = std::move(build.polygons);
  return sample;
}

double energy_identity_check(const EtaPolygon& polygon, const SubmanifoldPatch&) {
  double energy = 0.0;
  for (int i = 0; i < polygon.segments(); ++i) {
    const double upper = polygon.t[i];
    const double lower = polygon.t[i + 1];
    const double speed = polygon.c[i].norm() / upper;  // ray of w_i reaches w_i at t = upper
    energy += (upper - lower) * speed * speed;
  }
  return std::abs(energy - polygon.norm_v * polygon.norm_v);
}

double polygon_breakpoint_residual(const EtaPolygon& polygon, const SubmanifoldPatch& patch,
                                   const NumericParams& params) {
  double worst = 0.0;
  for (int i = 0; i + 1 < polygon.segments(); ++i) {
    const double t_break = polygon.t[i + 1];
    // Lower end of segment i and upper end of segment i+1 must push to the
    // same point under the normal exponential map.
    const Vec inner_scaled = (t_break / polygon.t[i]) * polygon.c[i];
    const Vec a = detail::geodesic_endpoint(
        *patch.parent, patch.point_at(polygon.u[i]),
        patch.normal_vector(polygon.u[i], inner_scaled), params);
    const Vec b = detail::geodesic_endpoint(
        *patch.parent, patch.point_at(polygon.u[i + 1]),
        patch.normal_vector(polygon.u[i + 1], polygon.c[i + 1]), params);
    worst = std::max(worst, (a - b).norm());
  }
  return worst;
}

DeltaDimension delta_dimension(const SubmanifoldPatch& patch, const Vec& u, const Vec& coeffs,
                               const FoliationSpec* foliation, const NumericParams& params) {
  DeltaDimension out;
  const JacobiBasisTrace basis = jacobi_basis(patch, u, coeffs, 1.0, params);
  const auto records = detect_focal(basis, 0.0, 1.0, params);
  out.index = morse_index(records, 1.0, params);

  if (foliation && foliation->leaf_dim(basis.geodesic.position.front()) ==
                       foliation->regular_leaf_dim) {
    const auto crossings = singular_crossings(basis.geodesic, *foliation, params);
    // Cross-check applies only when every interior focal time is a
    // singular-stratum crossing.
    bool all_from_crossings = true;
    int interior = 0;
    for (const FocalRecord& rec : records) {
      if (rec.time >= 1.0 - params.endpoint_tol) continue;
      ++interior;
      bool matched = false;
      for (const SingularCrossing& c : crossings)
        if (std::abs(c.time - rec.time) < 1e-6) matched = true;
      all_from_crossings = all_from_crossings && matched;
    }
    if (all_from_crossings && interior == static_cast<int>(crossings.size())) {
      int total = 0;
      for (const SingularCrossing& c : crossings) total += c.drop;
      out.foliation_crosscheck = total;
    }
  }
  return out;
}

int tangent_decomposition_dim(const SubmanifoldPatch& patch, const Vec& u, const Vec& coeffs,
                              const NumericParams& params) {
  // Fresh derivation at doubled grid resolution.
  NumericParams dense = params;
  dense.nodes_per_unit *= 2;
  const JacobiBasisTrace basis = jacobi_basis(patch, u, coeffs, 1.0, dense);
  const auto records = detect_focal(basis, 0.0, 1.0, dense);

  const int ell = patch.leaf_dimension;
  const int k = patch.normal_rank();
  int total = 0;
  for (const FocalRecord& rec : records) {
    if (rec.time >= 1.0 - params.endpoint_tol) continue;
    if (!rec.regular)
      throw DomainError("tangent_decomposition_dim: non-regular focal crossing");
    // Ray-neighborhood regularity: nearby rays cross the focal set exactly
    // once inside a window around t*.
    const double window = 0.05;
    for (int probe = 0; probe < 4; ++probe) {
      Vec u2 = u;
      Vec c2 = coeffs;
      const double delta = 1e-3 * std::max(1.0, coeffs.norm());
      if (ell > 0 && probe < 2) {
        u2[probe % ell] += (probe % 2 == 0 ? delta : -delta);
      } else if (k > 1) {
        // Rotate the direction slightly within the normal sphere.
        const int axis = probe % k;
        c2[axis] += (probe % 2 == 0 ? delta : -delta);
        c2 *= coeffs.norm() / c2.norm();
      } else if (ell > 0) {
        u2[probe % ell] += (probe % 2 == 0 ? 2.0 * delta : -2.0 * delta);
      } else {
        continue;
      }
      const JacobiBasisTrace nb = jacobi_basis(patch, u2, c2, 1.0, params);
      const auto nb_records = detect_focal(nb, 0.0, 1.0, params);
      int crossings_in_window = 0;
      for (const FocalRecord& nrec : nb_records)
        if (std::abs(nrec.time - rec.time) < window) ++crossings_in_window;
      if (crossings_in_window != 1)
        throw DomainError("tangent_decomposition_dim: crossing count not locally constant");
    }
    total += rec.multiplicity;
  }
  return total;
}

int cohdim_bookkeeping(const BundleDescriptor& descriptor) {
  if (!descriptor.root) return 0;
  struct Rec {
    static int cohdim(const BundleNode& node) {
      if (node.base_dim < 0) throw DomainError("cohdim_bookkeeping: negative fiber dimension");
      int child = 0;
      bool first = true;
      for (const BundleNode& c : node.children) {
        const int value = cohdim(c);
        if (first) {
          child = value;
          first = false;
        } else if (value != child) {
          throw DomainError("cohdim_bookkeeping: malformed tree (children disagree)");
        }
      }
      return child + node.base_dim;
    }
  };
  return Rec::cohdim(*descriptor.root);
}

BundleDescriptor build_bundle_descriptor(const SubmanifoldPatch& patch, const Vec& u,
                                         const Vec& coeffs, const NumericParams& params) {
  BundleDescriptor descriptor;
  struct Builder {
    const SubmanifoldPatch& patch;
    const NumericParams& params;
    std::optional<BundleNode> build(const Vec& u, const Vec& coeffs, int depth) const {
      if (depth > params.recursion_cap)
        throw DomainError("build_bundle_descriptor: recursion depth cap exceeded");
      const std::vector<FocalRecord> records = interior_records(patch, u, coeffs, params);
      if (records.empty()) return std::nullopt;
      const FocalRecord& outer = records.back();
      BundleNode node;
      node.focal_time = outer.time;
      node.base_dim = outer.multiplicity;
      // Recurse down the rescaled ray to the next focal level.
      if (auto child = build(u, outer.time * coeffs, depth + 1)) node.children.push_back(*child);
      return node;
    }
  };
  descriptor.root = Builder{patch, params}.build(u, coeffs, 0);
  return descriptor;
}

}  // namespace ff
