#include "doctest.h"

#include "focalforge/foliation.hpp"
#include "focalforge/rng.hpp"

#include <cmath>

using namespace ff;

namespace {

GeodesicTrace radial_line(const FoliationSpec& fol, const Vec& start, const Vec& dir,
                          double horizon) {
  return integrate_geodesic(fol.parent, start, dir, horizon);
}

Vec hopf_horizontal_direction(const Vec& p, Rng& rng) {
  const Vec ip = Vec{{-p[1], p[0], -p[3], p[2]}};
  Vec v = rng.gaussian_vector(4);
  v -= v.dot(p) * p;
  v -= v.dot(ip) * ip;
  return v / v.norm();
}

}  // namespace

TEST_CASE("horizontality of radial lines in concentric spheres") {
  const auto fol = concentric_spheres_foliation(3);
  const auto trace = radial_line(fol, Vec{{2.0, 0.0, 0.0}}, Vec{{-1.0, 0.0, 0.0}}, 1.0);
  const auto report = horizontality_check(trace, fol);
  CHECK(report.horizontal);
  CHECK(report.max_deviation < 1e-10);
}

TEST_CASE("hopf: vertical start fails, horizontal start propagates") {
  const auto fol = hopf_foliation();
  Vec p(4);
  p << 1.0, 0.0, 0.0, 0.0;
  const Vec ip = Vec{{0.0, 1.0, 0.0, 0.0}};
  {
    const auto trace = integrate_geodesic(fol.parent, p, ip, 1.0);
    CHECK_FALSE(horizontality_check(trace, fol).horizontal);
  }
  {
    Rng rng(41);
    const Vec v = hopf_horizontal_direction(p, rng);
    const auto trace = integrate_geodesic(fol.parent, p, v, 2.0);
    const auto report = horizontality_check(trace, fol);
    CHECK(report.horizontal);
    CHECK(report.max_deviation < 1e-8);
  }
}

TEST_CASE("crossing numbers of radial lines") {
  SUBCASE("through the origin in R^3: one crossing of drop 2") {
    const auto fol = concentric_spheres_foliation(3);
    const auto trace = radial_line(fol, Vec{{-1.0, 0.0, 0.0}}, Vec{{1.0, 0.0, 0.0}}, 2.0);
    const auto crossings = singular_crossings(trace, fol);
    REQUIRE(crossings.size() == 1);
    CHECK(crossings[0].time == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(crossings[0].drop == 2);
    CHECK(crossing_number(trace, fol) == 2);
  }
  SUBCASE("through the origin in R^2: drop 1") {
    const auto fol = concentric_spheres_foliation(2);
    const auto trace = radial_line(fol, Vec{{-1.0, 0.0}}, Vec{{1.0, 0.0}}, 2.0);
    CHECK(crossing_number(trace, fol) == 1);
  }
  SUBCASE("hopf horizontal geodesics never cross singular strata") {
    const auto fol = hopf_foliation();
    Rng rng(43);
    const Vec p = rng.unit_vector(4);
    const auto trace = integrate_geodesic(fol.parent, p, hopf_horizontal_direction(p, rng), 2.0);
    CHECK(crossing_number(trace, fol) == 0);
  }
  SUBCASE("endpoint on a singular leaf is rejected") {
    const auto fol = concentric_spheres_foliation(3);
    const auto trace = radial_line(fol, Vec{{-1.0, 0.0, 0.0}}, Vec{{1.0, 0.0, 0.0}}, 1.0);
    CHECK_THROWS_AS(crossing_number(trace, fol), DomainError);
  }
  SUBCASE("non-horizontal geodesics are rejected") {
    const auto fol = concentric_spheres_foliation(3);
    const auto trace = radial_line(fol, Vec{{1.0, 0.0, 0.0}}, Vec{{0.0, 1.0, 0.0}}, 1.0);
    CHECK_THROWS_AS(crossing_number(trace, fol), DomainError);
  }
}

TEST_CASE("vertical jacobi basis") {
  SUBCASE("hopf: W spanned by the unit Killing restriction, never vanishing") {
    const auto fol = hopf_foliation();
    Rng rng(47);
    const Vec p = rng.unit_vector(4);
    const auto trace = integrate_geodesic(fol.parent, p, hopf_horizontal_direction(p, rng), 2.0);
    const auto w = vertical_jacobi_basis(trace, fol);
    CHECK(w.vertical_rank == 1);
    CHECK(w.max_jacobi_residual < 1e-6);
    CHECK(w.max_span_deviation < 1e-8);
    double min_norm = 1e9;
    for (const Mat& val : w.value) min_norm = std::min(min_norm, val.col(0).norm());
    CHECK(min_norm > 0.9);  // |V| = 1 along the geodesic
    CHECK(w_focal_index(w) == 0);
  }
  SUBCASE("concentric spheres: rotation restrictions vanish at the origin crossing") {
    const auto fol = concentric_spheres_foliation(3);
    const auto trace = radial_line(fol, Vec{{-1.0, 0.0, 0.0}}, Vec{{1.0, 0.0, 0.0}}, 2.0);
    const auto w = vertical_jacobi_basis(trace, fol);
    CHECK(w.vertical_rank == 2);
    const int mid = trace.nodes() / 2;  // node at the crossing t = 1
    CHECK(w.value[mid].cwiseAbs().maxCoeff() < 1e-6);
    CHECK(w_focal_index(w) == 2);
    // W-focal times coincide with the singular crossings.
    const auto wt = w_focal_times(w);
    const auto crossings = singular_crossings(trace, fol);
    REQUIRE(wt.size() == crossings.size());
    for (size_t i = 0; i < wt.size(); ++i)
      CHECK(std::abs(wt[i] - crossings[i].time) < 1e-6);
  }
  SUBCASE("trivial point foliation has an empty basis") {
    const auto e3 =
        std::make_shared<const RiemannianSpace>(RiemannianSpace::euclidean(3));
    const auto fol = trivial_point_foliation(e3);
    const auto trace = integrate_geodesic(e3, Vec{{0.0, 0.0, 0.0}}, Vec{{1.0, 0.0, 0.0}}, 1.0);
    const auto w = vertical_jacobi_basis(trace, fol);
    CHECK(w.vertical_rank == 0);
    CHECK(w_focal_index(w) == 0);
  }
  SUBCASE("regular-region geodesic has no W-focal times") {
    const auto fol = concentric_spheres_foliation(3);
    const auto trace = radial_line(fol, Vec{{1.0, 0.0, 0.0}}, Vec{{1.0, 0.0, 0.0}}, 2.0);
    CHECK(w_focal_index(trace, fol) == 0);
  }
}

TEST_CASE("ind_W equals the crossing number on randomized horizontal geodesics") {
  Rng rng(53);
  SUBCASE("concentric spheres in R^3 and R^2") {
    for (int m : {2, 3}) {
      const auto fol = concentric_spheres_foliation(m);
      for (int i = 0; i < 50; ++i) {
        const Vec dir = rng.unit_vector(m);
        const double r0 = rng.uniform(0.4, 1.5);
        const double span = rng.uniform(0.5, 3.0);
        if (std::abs(span - r0) < 0.05) continue;  // keep the endpoint regular
        const Vec start = r0 * dir;
        const auto trace = radial_line(fol, start, -dir, span);
        const int c = crossing_number(trace, fol);
        CHECK(w_focal_index(trace, fol) == c);
        CHECK(c == ((span > r0) ? m - 1 : 0));
      }
    }
  }
  SUBCASE("circles-x-line") {
    const auto fol = circles_x_line_foliation();
    for (int i = 0; i < 50; ++i) {
      const double r0 = rng.uniform(0.3, 1.2);
      const double phi = rng.uniform(0.0, 2.0 * M_PI);
      const double pitch = rng.uniform(-1.0, 1.0);
      const Vec start{{r0 * std::cos(phi), r0 * std::sin(phi), rng.uniform(-1.0, 1.0)}};
      // In-plane radial + vertical components stay horizontal.
      Vec dir{{-std::cos(phi), -std::sin(phi), pitch}};
      dir /= dir.norm();
      const double span = rng.uniform(0.5, 3.0);
      const double reach = span / std::sqrt(1.0 + pitch * pitch);
      if (std::abs(reach - r0) < 0.05) continue;  // keep the endpoint regular
      const auto trace = radial_line(fol, start, dir, span);
      const int c = crossing_number(trace, fol);
      CHECK(w_focal_index(trace, fol) == c);
      CHECK(c == ((reach > r0) ? 1 : 0));
    }
  }
  SUBCASE("hopf") {
    const auto fol = hopf_foliation();
    for (int i = 0; i < 50; ++i) {
      const Vec p = rng.unit_vector(4);
      const auto trace = integrate_geodesic(fol.parent, p, hopf_horizontal_direction(p, rng),
                                            rng.uniform(0.5, 3.0));
      CHECK(crossing_number(trace, fol) == 0);
      CHECK(w_focal_index(trace, fol) == 0);
    }
  }
}

TEST_CASE("killing generators are tangent to the leaves") {
  Rng rng(59);
  std::vector<FoliationSpec> fols;
  fols.push_back(concentric_spheres_foliation(3));
  fols.push_back(hopf_foliation());
  fols.push_back(circles_x_line_foliation());
  for (const auto& fol : fols) {
    for (int i = 0; i < 30; ++i) {
      Vec p;
      if (fol.name == "hopf") {
        p = rng.unit_vector(4);
      } else {
        p = rng.gaussian_vector(3);
        if (fol.singular_distance && fol.singular_distance(p) < 0.1) continue;
      }
      const auto frame = fol.vertical_frame(p);
      for (const auto& gen : fol.killing_generators) {
        Vec x = gen(p);
        for (const Vec& v : frame) x -= fol.parent->inner(p, x, v) * v;
        CHECK(fol.parent->norm(p, x) < 1e-9 * std::max(1.0, gen(p).norm()));
      }
    }
  }
}

TEST_CASE("leaf dimension is lower semicontinuous along sampled curves") {
  const auto fol = concentric_spheres_foliation(3);
  // Along a radial curve the dimension drops only at the isolated origin.
  int drops = 0;
  int prev = fol.regular_leaf_dim;
  for (int i = 0; i <= 400; ++i) {
    const double t = -1.0 + 2.0 * i / 400.0;
    const Vec p{{t, 0.0, 0.0}};
    const int dim = fol.leaf_dim(p);
    if (dim < prev) ++drops;
    CHECK(dim <= fol.regular_leaf_dim);
    prev = dim;
  }
  CHECK(drops <= 1);
}

TEST_CASE("foliation without homogeneity data is rejected") {
  FoliationSpec crippled = concentric_spheres_foliation(3);
  crippled.killing_generators.clear();
  const auto trace =
      integrate_geodesic(crippled.parent, Vec{{1.0, 0.0, 0.0}}, Vec{{1.0, 0.0, 0.0}}, 1.0);
  CHECK_THROWS_AS(vertical_jacobi_basis(trace, crippled), ConstructionError);
}
