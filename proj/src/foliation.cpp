#include "focalforge/foliation.hpp"

#include "rank_scan.hpp"

#include <Eigen/QR>

#include <cmath>
#include <sstream>

namespace ff {

namespace {
constexpr double kSingularSnap = 1e-7;  // leaf_dim snap width at the singular stratum

// Orthonormal completion of the radial direction, dropping the radial
// column: tangent frame of the sphere through p.
std::vector<Vec> sphere_tangent_frame(const Vec& p) {
  const int m = static_cast<int>(p.size());
  Vec n = p / p.norm();
  Mat a(m, m);
  a.col(0) = n;
  a.rightCols(m - 1) = Mat::Identity(m, m - 1);
  Eigen::HouseholderQR<Mat> qr(a);
  Mat q = qr.householderQ();
  if (q.col(0).dot(n) < 0.0) q = -q;
  std::vector<Vec> frame;
  for (int j = 1; j < m; ++j) frame.push_back(q.col(j));
  return frame;
}
}  // namespace

FoliationSpec concentric_spheres_foliation(int m) {
  if (m < 2) throw DomainError("concentric_spheres_foliation: ambient dimension >= 2 required");
  FoliationSpec spec;
  spec.parent = std::make_shared<const RiemannianSpace>(RiemannianSpace::euclidean(m));
  spec.regular_leaf_dim = m - 1;
  spec.leaf_dim = [m](const Vec& p) { return p.norm() <= kSingularSnap ? 0 : m - 1; };
  spec.vertical_frame = [](const Vec& p) {
    if (p.norm() <= kSingularSnap) return std::vector<Vec>{};
    return sphere_tangent_frame(p);
  };
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      spec.killing_generators.push_back([i, j, m](const Vec& p) {
        Vec x = Vec::Zero(m);
        x[i] = p[j];
        x[j] = -p[i];
        return x;
      });
  QuotientDescriptor q;
  q.project = [](const Vec& p) { return Vec::Constant(1, p.norm()); };
  q.model = std::make_shared<const RiemannianSpace>(RiemannianSpace::euclidean(1));
  q.description = "flat ray r >= 0";
  spec.quotient = std::move(q);
  spec.singular_distance = [](const Vec& p) { return p.norm(); };
  std::ostringstream name;
  name << "concentric-spheres-r" << m;
  spec.name = name.str();
  return spec;
}

namespace {
Vec quat_i(const Vec& p) { return Vec{{-p[1], p[0], -p[3], p[2]}}; }
}  // namespace

FoliationSpec hopf_foliation() {
  FoliationSpec spec;
  spec.parent = std::make_shared<const RiemannianSpace>(RiemannianSpace::round_sphere(3, 1.0));
  spec.regular_leaf_dim = 1;
  spec.leaf_dim = [](const Vec&) { return 1; };
  spec.vertical_frame = [](const Vec& p) { return std::vector<Vec>{quat_i(p)}; };
  spec.killing_generators.push_back([](const Vec& p) { return quat_i(p); });
  QuotientDescriptor q;
  q.project = [](const Vec& p) {
    // Hopf map to the 2-sphere of radius 1/2 in R^3.
    return Vec{{0.5 * (p[0] * p[0] + p[1] * p[1] - p[2] * p[2] - p[3] * p[3]),
                p[0] * p[2] + p[1] * p[3], p[1] * p[2] - p[0] * p[3]}};
  };
  q.model = std::make_shared<const RiemannianSpace>(RiemannianSpace::round_sphere(2, 0.5));
  q.description = "round 2-sphere of radius 1/2";
  spec.quotient = std::move(q);
  spec.name = "hopf";
  return spec;
}

FoliationSpec circles_x_line_foliation() {
  FoliationSpec spec;
  spec.parent = std::make_shared<const RiemannianSpace>(
      RiemannianSpace::product(RiemannianSpace::euclidean(2), RiemannianSpace::euclidean(1)));
  spec.regular_leaf_dim = 1;
  auto radial = [](const Vec& p) { return std::hypot(p[0], p[1]); };
  spec.leaf_dim = [radial](const Vec& p) { return radial(p) <= kSingularSnap ? 0 : 1; };
  spec.vertical_frame = [radial](const Vec& p) {
    const double r = radial(p);
    if (r <= kSingularSnap) return std::vector<Vec>{};
    return std::vector<Vec>{Vec{{-p[1] / r, p[0] / r, 0.0}}};
  };
  spec.killing_generators.push_back([](const Vec& p) { return Vec{{-p[1], p[0], 0.0}}; });
  QuotientDescriptor q;
  q.project = [radial](const Vec& p) { return Vec{{radial(p), p[2]}}; };
  q.model = std::make_shared<const RiemannianSpace>(RiemannianSpace::euclidean(2));
  q.description = "flat half plane (r, z), r >= 0";
  spec.quotient = std::move(q);
  spec.singular_distance = radial;
  spec.name = "circles-x-line";
  return spec;
}

FoliationSpec trivial_point_foliation(std::shared_ptr<const RiemannianSpace> space) {
  FoliationSpec spec;
  spec.parent = std::move(space);
  spec.regular_leaf_dim = 0;
  spec.leaf_dim = [](const Vec&) { return 0; };
  spec.vertical_frame = [](const Vec&) { return std::vector<Vec>{}; };
  QuotientDescriptor q;
  q.project = [](const Vec& p) { return p; };
  q.model = spec.parent;
  q.description = "identity quotient";
  spec.quotient = std::move(q);
  spec.name = "trivial-points";
  return spec;
}

HorizontalityReport horizontality_check(const GeodesicTrace& geodesic,
                                        const FoliationSpec& foliation, double tol) {
  HorizontalityReport report;
  for (int k = 0; k < geodesic.nodes(); ++k) {
    const Vec& p = geodesic.position[k];
    for (const Vec& v : foliation.vertical_frame(p)) {
      const double dev = std::abs(foliation.parent->inner(p, geodesic.velocity[k], v));
      report.max_deviation = std::max(report.max_deviation, dev);
    }
  }
  report.horizontal = report.max_deviation < tol;
  return report;
}

std::vector<SingularCrossing> singular_crossings(const GeodesicTrace& geodesic,
                                                 const FoliationSpec& foliation,
                                                 const NumericParams& params) {
  std::vector<SingularCrossing> crossings;
  if (!foliation.singular_distance) return crossings;
  const int n = geodesic.nodes();
  const std::vector<double>& times = geodesic.times;
  const double speed = geodesic.metric_speed(0);
  const double dt = times[1] - times[0];

  std::vector<double> dist(n);
  for (int k = 0; k < n; ++k) dist[k] = foliation.singular_distance(geodesic.position[k]);

  auto dist_at = [&](double t) { return foliation.singular_distance(geodesic.position_at(t)); };
  const double candidate = 1.5 * dt * speed + kSingularSnap;
  const double crossing_tol = 100.0 * params.bisect_tol * std::max(1.0, speed) + kSingularSnap;

  const int start_dim = foliation.leaf_dim(geodesic.position.front());
  for (int k = 1; k + 1 < n; ++k) {
    if (!(dist[k] <= dist[k - 1] && dist[k] <= dist[k + 1] && dist[k] < candidate)) continue;
    // Golden-section minimization of the singular distance.
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = times[k - 1], b = times[k + 1];
    double c = b - gr * (b - a), e = a + gr * (b - a);
    double fc = dist_at(c), fe = dist_at(e);
    while (b - a > params.bisect_tol) {
      if (fc < fe) {
        b = e;
        e = c;
        fe = fc;
        c = b - gr * (b - a);
        fc = dist_at(c);
      } else {
        a = c;
        c = e;
        fc = fe;
        e = a + gr * (b - a);
        fe = dist_at(e);
      }
    }
    const double t_star = 0.5 * (a + b);
    if (dist_at(t_star) > crossing_tol) continue;
    const Vec at = geodesic.position_at(t_star);
    const int dim_here = foliation.leaf_dim(at);
    if (dim_here >= start_dim) continue;
    // Transversality guard: the leaf dimension recovers within a grid step.
    const int before = foliation.leaf_dim(geodesic.position[std::max(0, k - 1)]);
    const int after = foliation.leaf_dim(geodesic.position[std::min(n - 1, k + 1)]);
    if (before != start_dim || after != start_dim)
      throw DomainError("singular_crossings: tangential contact with the singular stratum");
    crossings.push_back({t_star, dim_here, start_dim - dim_here});
  }
  return crossings;
}

int crossing_number(const GeodesicTrace& geodesic, const FoliationSpec& foliation,
                    const NumericParams& params) {
  const int start_dim = foliation.leaf_dim(geodesic.position.front());
  const int end_dim = foliation.leaf_dim(geodesic.position.back());
  if (start_dim != foliation.regular_leaf_dim || end_dim != foliation.regular_leaf_dim)
    throw DomainError("crossing_number: endpoints must lie on regular leaves");
  const HorizontalityReport horiz = horizontality_check(geodesic, foliation);
  if (!horiz.horizontal) {
    std::ostringstream msg;
    msg << "crossing_number: geodesic is not horizontal (max deviation " << horiz.max_deviation
        << ")";
    throw DomainError(msg.str());
  }
  int total = 0;
  for (const SingularCrossing& c : singular_crossings(geodesic, foliation, params))
    total += c.drop;
  return total;
}

VerticalJacobiTrace vertical_jacobi_basis(const GeodesicTrace& geodesic,
                                          const FoliationSpec& foliation,
                                          const NumericParams& params) {
  const RiemannianSpace& sp = *foliation.parent;
  if (foliation.leaf_dim(geodesic.position.front()) != foliation.regular_leaf_dim)
    throw DomainError("vertical_jacobi_basis: geodesic must start on a regular leaf");
  const HorizontalityReport horiz = horizontality_check(geodesic, foliation);
  if (!horiz.horizontal)
    throw DomainError("vertical_jacobi_basis: geodesic is not horizontal");

  VerticalJacobiTrace out;
  out.frame_trace = parallel_frame_trace(foliation.parent, geodesic.position.front(),
                                         geodesic.velocity.front(), geodesic.horizon, params);
  const GeodesicTrace& g = out.frame_trace.geodesic;
  const int n = g.nodes();
  const int m = sp.dimension() - 1;
  const int generators = static_cast<int>(foliation.killing_generators.size());

  // d(gamma) = max leaf dimension along the geodesic (start is regular).
  const int d = foliation.regular_leaf_dim;
  out.vertical_rank = d;
  if (d == 0) {
    out.value.assign(n, Mat::Zero(m, 0));
    out.derivative.assign(n, Mat::Zero(m, 0));
    return out;
  }
  if (generators < d)
    throw ConstructionError("vertical_jacobi_basis: foliation lacks homogeneity data");

  // Killing restrictions in frame coordinates.
  std::vector<Mat> all(n, Mat(m, generators));
  for (int k = 0; k < n; ++k) {
    const Vec& p = g.position[k];
    for (int j = 0; j < generators; ++j) {
      const Vec x = foliation.killing_generators[j](p);
      for (int a = 0; a < m; ++a) all[k](a, j) = sp.inner(p, x, out.frame_trace.frame[k].col(a));
    }
  }

  // Select d independent generators at the (regular) start.
  Eigen::ColPivHouseholderQR<Mat> qr(all[0]);
  qr.setThreshold(1e-10);
  if (qr.rank() < d)
    throw ConstructionError("vertical_jacobi_basis: generators do not span the leaf at the start");
  std::vector<int> chosen;
  for (int j = 0; j < d; ++j) chosen.push_back(qr.colsPermutation().indices()[j]);
  std::sort(chosen.begin(), chosen.end());

  out.value.assign(n, Mat(m, d));
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < d; ++j) out.value[k].col(j) = all[k].col(chosen[j]);

  // Covariant derivative: the frame is parallel, so fourth-order stencils
  // on the coordinates suffice (one-sided at the ends).
  out.derivative.assign(n, Mat(m, d));
  const double dt = g.times[1] - g.times[0];
  auto stencil = [&](int k) {
    if (k >= 2 && k + 2 < n)
      return Mat((out.value[k - 2] - 8.0 * out.value[k - 1] + 8.0 * out.value[k + 1] -
                  out.value[k + 2]) /
                 (12.0 * dt));
    auto fwd = [&](int base, double sign) {
      return Mat((-25.0 * out.value[base] + 48.0 * out.value[base + int(sign)] -
                  36.0 * out.value[base + 2 * int(sign)] +
                  16.0 * out.value[base + 3 * int(sign)] -
                  3.0 * out.value[base + 4 * int(sign)]) /
                 (12.0 * dt * sign));
    };
    auto near = [&](int base, double sign) {
      return Mat((-3.0 * out.value[base - int(sign)] - 10.0 * out.value[base] +
                  18.0 * out.value[base + int(sign)] - 6.0 * out.value[base + 2 * int(sign)] +
                  out.value[base + 3 * int(sign)]) /
                 (12.0 * dt * sign));
    };
    if (k == 0) return fwd(0, 1.0);
    if (k == 1) return near(1, 1.0);
    if (k == n - 1) return fwd(n - 1, -1.0);
    return near(n - 2, -1.0);
  };
  for (int k = 0; k < n; ++k) out.derivative[k] = stencil(k);

  // Verify the restrictions solve the Jacobi equation.
  for (int k = 2; k + 2 < n; ++k) {
    const Mat second = (-out.value[k - 2] + 16.0 * out.value[k - 1] - 30.0 * out.value[k] +
                        16.0 * out.value[k + 1] - out.value[k + 2]) /
                       (12.0 * dt * dt);
    const double res =
        (second + out.frame_trace.curvature[k] * out.value[k]).cwiseAbs().maxCoeff();
    out.max_jacobi_residual = std::max(out.max_jacobi_residual, res);
  }
  if (out.max_jacobi_residual > 1e-6)
    throw ConstructionError("vertical_jacobi_basis: Killing restrictions fail the Jacobi check");

  // Span check against the vertical frame at regular nodes.
  for (int k = 0; k < n; ++k) {
    const Vec& p = g.position[k];
    if (foliation.singular_distance && foliation.singular_distance(p) < 1e-3) continue;
    const std::vector<Vec> vf = foliation.vertical_frame(p);
    if (static_cast<int>(vf.size()) != d) continue;
    Mat vmat(m, d);
    for (int j = 0; j < d; ++j)
      for (int a = 0; a < m; ++a)
        vmat(a, j) = sp.inner(p, vf[j], out.frame_trace.frame[k].col(a));
    // Largest principal-angle sine between the two spans, computed as the
    // projection residual (stable near angle zero).
    Eigen::HouseholderQR<Mat> qa(out.value[k]);
    Eigen::HouseholderQR<Mat> qb(vmat);
    const Mat qa_thin = qa.householderQ() * Mat::Identity(m, d);
    const Mat qb_thin = qb.householderQ() * Mat::Identity(m, d);
    const Mat residual = qb_thin - qa_thin * (qa_thin.transpose() * qb_thin);
    const Vec sines = detail::matrix_singular_values(residual);
    out.max_span_deviation = std::max(out.max_span_deviation, sines[0]);
  }
  if (out.max_span_deviation > 1e-8)
    throw ConstructionError("vertical_jacobi_basis: span mismatch with the vertical frame");
  return out;
}

std::vector<double> w_focal_times(const VerticalJacobiTrace& vertical,
                                  const NumericParams& params) {
  std::vector<double> times;
  if (vertical.vertical_rank == 0) return times;
  const double horizon = vertical.frame_trace.geodesic.horizon;
  const auto drops =
      detail::scan_rank_drops(vertical.frame_trace.geodesic.times, vertical.value,
                              vertical.derivative, 0.0, horizon - params.endpoint_tol, params);
  for (const auto& drop : drops) times.push_back(drop.time);
  return times;
}

int w_focal_index(const VerticalJacobiTrace& vertical, const NumericParams& params) {
  if (vertical.vertical_rank == 0) return 0;
  const double horizon = vertical.frame_trace.geodesic.horizon;
  const auto drops =
      detail::scan_rank_drops(vertical.frame_trace.geodesic.times, vertical.value,
                              vertical.derivative, 0.0, horizon - params.endpoint_tol, params);
  int total = 0;
  for (const auto& drop : drops) total += drop.corank;
  return total;
}

int w_focal_index(const GeodesicTrace& geodesic, const FoliationSpec& foliation,
                  const NumericParams& params) {
  return w_focal_index(vertical_jacobi_basis(geodesic, foliation, params), params);
}

}  // namespace ff
