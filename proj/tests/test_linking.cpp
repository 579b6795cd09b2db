#include "doctest.h"

#include "focalforge/linking.hpp"

#include <cmath>
#include <memory>

using namespace ff;

namespace {
std::shared_ptr<const RiemannianSpace> make_space(RiemannianSpace s) {
  return std::make_shared<const RiemannianSpace>(std::move(s));
}

SubmanifoldPatch s2_point() {
  const auto s2 = make_space(RiemannianSpace::round_sphere(2, 1.0));
  return point_patch(s2, Vec{{1.0, 0.0, 0.0}});
}
}  // namespace

TEST_CASE("first focal parameter") {
  SUBCASE("sphere through the origin: m(v) = 1/2") {
    const auto sph = sphere_patch(1.0);
    CHECK(first_focal_param(sph, Vec{{0.4, 0.1}}, Vec::Constant(1, -2.0)) ==
          doctest::Approx(0.5).epsilon(1e-8));
  }
  SUBCASE("point source |v| = 3 pi / 2: m(v) = 2/3") {
    CHECK(first_focal_param(s2_point(), Vec(0), Vec{{1.5 * M_PI, 0.0}}) ==
          doctest::Approx(2.0 / 3.0).epsilon(1e-8));
  }
  SUBCASE("index-zero vector: m(v) = 0") {
    CHECK(first_focal_param(s2_point(), Vec(0), Vec{{0.5, 0.0}}) == 0.0);
  }
}

TEST_CASE("Zv sampling on the sphere through the origin") {
  const auto sph = sphere_patch(1.0);
  Rng rng(107);
  const auto sample = sample_Zv(sph, Vec{{0.9, -0.3}}, Vec::Constant(1, -2.0), 8, rng);
  CHECK(sample.diagnostics.empty());
  CHECK(sample.depth == 1);
  REQUIRE(sample.polygons.size() == 8);
  for (const auto& poly : sample.polygons) {
    REQUIRE(poly.segments() == 2);
    CHECK(poly.t[1] == doctest::Approx(0.5).epsilon(1e-7));
    CHECK(energy_identity_check(poly, sph) < 1e-8);
    CHECK(polygon_breakpoint_residual(poly, sph) < 1e-7);
    CHECK(std::abs(poly.norm_v * poly.norm_v - 4.0) < 1e-10);
  }
  // Energy constancy across all polygons of one sample.
  double spread = 0.0;
  for (const auto& poly : sample.polygons)
    spread = std::max(spread, energy_identity_check(poly, sph));
  CHECK(spread < 1e-8);
}

TEST_CASE("index-zero vector gives the unbroken polygon") {
  const auto sph = sphere_patch(1.0);
  Rng rng(109);
  const auto sample = sample_Zv(sph, Vec{{0.2, 0.2}}, Vec::Constant(1, -0.5), 8, rng);
  REQUIRE(sample.polygons.size() == 1);
  CHECK(sample.polygons[0].segments() == 1);
  CHECK(sample.depth == 0);
  CHECK(energy_identity_check(sample.polygons[0], sph) == 0.0);
}

TEST_CASE("depth-2 recursion on the 2-sphere point source") {
  const auto pt = s2_point();
  Rng rng(113);
  const Vec v{{2.5 * M_PI, 0.0}};
  const auto sample = sample_Zv(pt, Vec(0), v, 4, rng);
  CHECK(sample.depth == 2);
  REQUIRE(sample.polygons.size() == 16);
  const double energy = std::pow(2.5 * M_PI, 2);
  for (const auto& poly : sample.polygons) {
    REQUIRE(poly.segments() == 3);
    CHECK(poly.t[1] == doctest::Approx(0.8).epsilon(1e-7));
    CHECK(poly.t[2] == doctest::Approx(0.4).epsilon(1e-7));
    CHECK(std::abs(poly.norm_v * poly.norm_v - energy) < 1e-9);
    CHECK(energy_identity_check(poly, pt) < 1e-8);
    CHECK(polygon_breakpoint_residual(poly, pt) < 1e-7);
  }
}

TEST_CASE("hand-corrupted polygon is flagged by the energy identity") {
  const auto sph = sphere_patch(1.0);
  Rng rng(127);
  auto sample = sample_Zv(sph, Vec{{0.9, -0.3}}, Vec::Constant(1, -2.0), 2, rng);
  REQUIRE(!sample.polygons.empty());
  EtaPolygon poly = sample.polygons.front();
  CHECK(energy_identity_check(poly, sph) < 1e-8);
  poly.c[1] *= 1.01;  // corrupt the inner segment
  const double deviation = energy_identity_check(poly, sph);
  CHECK(deviation > 0.005 * poly.norm_v * poly.norm_v);
}

TEST_CASE("delta dimension with the foliation cross-check") {
  SUBCASE("sphere through the origin: 2, crossings agree") {
    const auto sph = sphere_patch(1.0);
    const auto fol = concentric_spheres_foliation(3);
    const auto dim = delta_dimension(sph, Vec{{0.1, 0.5}}, Vec::Constant(1, -2.0), &fol);
    CHECK(dim.index == 2);
    REQUIRE(dim.foliation_crosscheck.has_value());
    CHECK(*dim.foliation_crosscheck == 2);
  }
  SUBCASE("hopf fiber: index 1, no cross-check (focal point is horizontal)") {
    Vec base(4);
    base << 1.0, 0.0, 0.0, 0.0;
    const auto fiber = hopf_fiber_patch(base);
    const auto fol = hopf_foliation();
    const auto dim =
        delta_dimension(fiber, Vec::Constant(1, 0.3), Vec{{0.8 * M_PI, 0.0}}, &fol);
    CHECK(dim.index == 1);
    CHECK_FALSE(dim.foliation_crosscheck.has_value());
  }
  SUBCASE("short vector: 0") {
    const auto sph = sphere_patch(1.0);
    CHECK(delta_dimension(sph, Vec{{0.0, 0.0}}, Vec::Constant(1, -0.3)).index == 0);
  }
}

TEST_CASE("tangent decomposition dimension") {
  SUBCASE("sphere through the origin: 2 = 2") {
    const auto sph = sphere_patch(1.0);
    const int dim = tangent_decomposition_dim(sph, Vec{{0.4, 0.2}}, Vec::Constant(1, -2.0));
    CHECK(dim == 2);
    CHECK(dim == delta_dimension(sph, Vec{{0.4, 0.2}}, Vec::Constant(1, -2.0)).index);
  }
  SUBCASE("point source |v| = 3 pi / 2: 1 = 1") {
    const auto pt = s2_point();
    const int dim = tangent_decomposition_dim(pt, Vec(0), Vec{{1.5 * M_PI, 0.0}});
    CHECK(dim == 1);
    CHECK(dim == delta_dimension(pt, Vec(0), Vec{{1.5 * M_PI, 0.0}}).index);
  }
  SUBCASE("index-zero: 0 = 0") {
    const auto pt = s2_point();
    CHECK(tangent_decomposition_dim(pt, Vec(0), Vec{{0.4, 0.0}}) == 0);
  }
}

TEST_CASE("cohomological-dimension bookkeeping") {
  SUBCASE("single level, base dimension 2") {
    BundleDescriptor d;
    d.root = BundleNode{0.5, 2, {}};
    CHECK(cohdim_bookkeeping(d) == 2);
  }
  SUBCASE("two levels of dimension 1") {
    BundleDescriptor d;
    d.root = BundleNode{0.8, 1, {BundleNode{0.5, 1, {}}}};
    CHECK(cohdim_bookkeeping(d) == 2);
  }
  SUBCASE("empty tree") { CHECK(cohdim_bookkeeping(BundleDescriptor{}) == 0); }
  SUBCASE("malformed tree: children disagree") {
    BundleDescriptor d;
    d.root = BundleNode{0.8, 1, {BundleNode{0.5, 1, {}}, BundleNode{0.5, 2, {}}}};
    CHECK_THROWS_AS(cohdim_bookkeeping(d), DomainError);
  }
}

TEST_CASE("descriptor from the focal chain agrees with both dimension counts") {
  SUBCASE("sphere through the origin") {
    const auto sph = sphere_patch(1.0);
    const auto d = build_bundle_descriptor(sph, Vec{{0.8, -0.1}}, Vec::Constant(1, -2.0));
    REQUIRE(d.root.has_value());
    CHECK(d.root->base_dim == 2);
    CHECK(d.root->children.empty());
    CHECK(cohdim_bookkeeping(d) == 2);
  }
  SUBCASE("2-sphere point source |v| = 5 pi / 2") {
    const auto pt = s2_point();
    const Vec v{{2.5 * M_PI, 0.0}};
    const auto d = build_bundle_descriptor(pt, Vec(0), v);
    REQUIRE(d.root.has_value());
    CHECK(d.root->focal_time == doctest::Approx(0.8).epsilon(1e-7));
    CHECK(d.root->base_dim == 1);
    REQUIRE(d.root->children.size() == 1);
    CHECK(d.root->children[0].base_dim == 1);
    const int cohdim = cohdim_bookkeeping(d);
    CHECK(cohdim == 2);
    CHECK(cohdim == delta_dimension(pt, Vec(0), v).index);
    CHECK(cohdim == tangent_decomposition_dim(pt, Vec(0), v));
  }
}

TEST_CASE("polygon chain consistency: m(w_prev) |w_prev| = |w|") {
  const auto pt = s2_point();
  Rng rng(131);
  const Vec v{{2.5 * M_PI, 0.0}};
  const auto sample = sample_Zv(pt, Vec(0), v, 3, rng);
  REQUIRE(!sample.polygons.empty());
  for (const auto& poly : sample.polygons) {
    for (int i = 0; i + 1 < poly.segments(); ++i) {
      const double m_outer = first_focal_param(pt, poly.u[i], poly.c[i]);
      CHECK(std::abs(m_outer * poly.c[i].norm() - poly.c[i + 1].norm()) <
            1e-8 * std::max(1.0, poly.c[i].norm()));
    }
  }
}
