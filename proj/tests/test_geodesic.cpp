#include "doctest.h"

#include "focalforge/geodesic.hpp"
#include "focalforge/rng.hpp"

#include <cmath>
#include <memory>

using namespace ff;

namespace {
std::shared_ptr<const RiemannianSpace> make_space(RiemannianSpace s) {
  return std::make_shared<const RiemannianSpace>(std::move(s));
}
}  // namespace

TEST_CASE("straight line in the plane") {
  const auto e2 = make_space(RiemannianSpace::euclidean(2));
  const auto trace = integrate_geodesic(e2, Vec{{0.0, 0.0}}, Vec{{1.0, 0.0}}, 3.0);
  CHECK((trace.position.back() - Vec{{3.0, 0.0}}).norm() < 1e-10);
  CHECK(trace.speed_drift() < 1e-12);
}

TEST_CASE("great circle closes up after 2 pi") {
  const auto s2 = make_space(RiemannianSpace::round_sphere(2, 1.0));
  const Vec p = Vec{{0.0, 0.0, 1.0}};
  const Vec v = Vec{{1.0, 0.0, 0.0}};
  const auto trace = integrate_geodesic(s2, p, v, 2.0 * M_PI);
  CHECK((trace.position.back() - p).norm() < 1e-7);
  CHECK(trace.speed_drift() < 1e-8);
  CHECK(trace.max_constraint_residual() < 1e-9);
}

TEST_CASE("closed-form great circle on the 3-sphere") {
  const auto s3 = make_space(RiemannianSpace::round_sphere(3, 1.0));
  Vec p(4), v(4);
  p << 1.0, 0.0, 0.0, 0.0;
  v << 0.0, 0.0, 1.0, 0.0;
  const auto trace = integrate_geodesic(s3, p, v, 2.5);
  for (int k = 0; k < trace.nodes(); k += 97) {
    const double t = trace.times[k];
    Vec expect(4);
    expect << std::cos(t), 0.0, std::sin(t), 0.0;
    CHECK((trace.position[k] - expect).norm() < 1e-7);
  }
}

TEST_CASE("chart-metric geodesic conserves metric speed") {
  const MetricMap stereo = [](const Vec& x) {
    return Mat::Identity(2, 2) * (4.0 / std::pow(1.0 + x.squaredNorm(), 2));
  };
  const auto chart = make_space(RiemannianSpace::chart_metric(2, stereo));
  const auto trace = integrate_geodesic(chart, Vec{{0.1, -0.3}}, Vec{{0.4, 0.2}}, 2.0);
  CHECK(trace.speed_drift() < 1e-8);
}

TEST_CASE("fixed output grid density") {
  const auto e2 = make_space(RiemannianSpace::euclidean(2));
  NumericParams params;
  const auto trace = integrate_geodesic(e2, Vec{{0.0, 0.0}}, Vec{{1.0, 0.0}}, 1.0, params);
  CHECK(trace.nodes() == params.nodes_per_unit + 1);
  const auto trace2 = integrate_geodesic(e2, Vec{{0.0, 0.0}}, Vec{{1.0, 0.0}}, 0.5, params);
  CHECK(trace2.nodes() == params.nodes_per_unit / 2 + 1);
}

TEST_CASE("hermite interpolation between nodes") {
  const auto s2 = make_space(RiemannianSpace::round_sphere(2, 1.0));
  const auto trace =
      integrate_geodesic(s2, Vec{{0.0, 0.0, 1.0}}, Vec{{1.0, 0.0, 0.0}}, 2.0);
  Rng rng(3);
  for (int i = 0; i < 25; ++i) {
    const double t = rng.uniform(0.0, 2.0);
    Vec expect(3);
    expect << std::sin(t), 0.0, std::cos(t);
    CHECK((trace.position_at(t) - expect).norm() < 1e-9);
  }
}

TEST_CASE("normal_exp closed forms") {
  NumericParams params;
  // Hyperplane: foot point + 2 * normal.
  const auto plane = hyperplane_patch(3);
  const Vec u = Vec{{0.4, -1.2}};
  const Vec v2 = 2.0 * plane.normal_frame(u)[0];
  CHECK((normal_exp(plane, u, v2, params) - Vec{{0.4, -1.2, 2.0}}).norm() < 1e-10);

  // Inward unit segment from the unit circle reaches the center.
  const auto circ = circle_patch(1.0);
  const Vec theta = Vec::Constant(1, 1.1);
  const Vec inward = -circ.normal_frame(theta)[0];
  CHECK(normal_exp(circ, theta, inward, params).norm() < 1e-10);

  // Point patch on the round 2-sphere: length pi reaches the antipode.
  const auto s2 = make_space(RiemannianSpace::round_sphere(2, 1.0));
  const Vec p = Vec{{1.0, 0.0, 0.0}};
  const auto pt = point_patch(s2, p);
  const Vec n = pt.normal_frame(Vec(0))[0];
  CHECK((normal_exp(pt, Vec(0), M_PI * n, params) + p).norm() < 1e-7);

  // Vectors outside the normal-frame span are rejected.
  const Vec bad = circ.tangent_frame(theta)[0];
  CHECK_THROWS_AS(normal_exp(circ, theta, bad, params), DomainError);
}

TEST_CASE("integration failure carries the last good time") {
  // Metric undefined past a wall at x = 0.5; the geodesic runs into it.
  const MetricMap walled = [](const Vec& x) {
    Mat g = Mat::Identity(2, 2);
    if (x[0] > 0.5) g(0, 0) = std::nan("");
    return g;
  };
  const auto chart = make_space(RiemannianSpace::chart_metric(2, walled));
  try {
    integrate_geodesic(chart, Vec{{0.0, 0.0}}, Vec{{1.0, 0.0}}, 10.0);
    CHECK(false);
  } catch (const IntegrationError& err) {
    CHECK(err.last_good_time() >= 0.0);
    CHECK(err.last_good_time() < 0.6);
  }
}

TEST_CASE("speed constancy on random geodesics") {
  Rng rng(23);
  const auto s3 = make_space(RiemannianSpace::round_sphere(3, 1.0));
  for (int i = 0; i < 5; ++i) {
    const Vec p = rng.unit_vector(4);
    Vec v = rng.gaussian_vector(4);
    v -= v.dot(p) * p;
    const auto trace = integrate_geodesic(s3, p, v, 1.0);
    CHECK(trace.speed_drift() < 1e-8);
    CHECK(trace.max_constraint_residual() < 1e-9);
  }
}
