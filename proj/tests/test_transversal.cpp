#include "doctest.h"

#include "focalforge/transversal.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

using namespace ff;

namespace {

Vec quat_i(const Vec& p) { return Vec{{-p[1], p[0], -p[3], p[2]}}; }

Vec hopf_horizontal_direction(const Vec& p, Rng& rng) {
  const Vec ip = quat_i(p);
  Vec v = rng.gaussian_vector(4);
  v -= v.dot(p) * p;
  v -= v.dot(ip) * ip;
  return v / v.norm();
}

// Foliation of R^3 by parallel planes {x} x R^2: translations make the
// vertical bundle parallel, so the A-tensor vanishes identically.
FoliationSpec parallel_planes_foliation() {
  FoliationSpec spec;
  spec.parent = std::make_shared<const RiemannianSpace>(RiemannianSpace::euclidean(3));
  spec.regular_leaf_dim = 2;
  spec.leaf_dim = [](const Vec&) { return 2; };
  spec.vertical_frame = [](const Vec&) {
    return std::vector<Vec>{Vec{{0.0, 1.0, 0.0}}, Vec{{0.0, 0.0, 1.0}}};
  };
  spec.killing_generators.push_back([](const Vec&) { return Vec{{0.0, 1.0, 0.0}}; });
  spec.killing_generators.push_back([](const Vec&) { return Vec{{0.0, 0.0, 1.0}}; });
  spec.name = "parallel-planes";
  return spec;
}

}  // namespace

TEST_CASE("extend_vertical_bundle") {
  SUBCASE("hopf: no vanishing, W~ = W everywhere") {
    const auto fol = hopf_foliation();
    Rng rng(59);
    const Vec p = rng.unit_vector(4);
    const auto trace = integrate_geodesic(fol.parent, p, hopf_horizontal_direction(p, rng), 2.0);
    const auto sys = build_transversal_system(trace, fol);
    CHECK(sys.h_dim == 1);
    for (int k = 0; k < trace.nodes(); k += 311) {
      // W~ column is the normalized Killing value.
      const Vec v = sys.vertical.value[k].col(0);
      const double align = std::abs(sys.wtilde[k].col(0).dot(v / v.norm()));
      CHECK(align == doctest::Approx(1.0).epsilon(1e-9));
    }
    CHECK(sys.max_wtilde_jump < 1e-2);
  }
  SUBCASE("concentric spheres: completion by derivative vectors at the crossing") {
    const auto fol = concentric_spheres_foliation(3);
    const auto trace =
        integrate_geodesic(fol.parent, Vec{{-1.0, 0.0, 0.0}}, Vec{{1.0, 0.0, 0.0}}, 2.0);
    const auto vertical = vertical_jacobi_basis(trace, fol);
    const auto wtilde = extend_vertical_bundle(vertical);
    const int n = trace.nodes();
    // Along a radial line the bundle is the constant plane orthogonal to
    // the direction; check rank d everywhere including the crossing node.
    const Mat& ref = wtilde[100];
    for (int k = 0; k < n; k += n / 16) {
      CHECK(wtilde[k].cols() == 2);
      const Mat residual = wtilde[k] - ref * (ref.transpose() * wtilde[k]);
      CHECK(residual.cwiseAbs().maxCoeff() < 1e-6);
    }
    const int mid = n / 2;
    CHECK(vertical.value[mid].cwiseAbs().maxCoeff() < 1e-6);  // W vanishes at the node
    CHECK(wtilde[mid].cols() == 2);                           // but W~ keeps full rank
  }
  SUBCASE("point foliation: empty W~, H is the full normal space") {
    const auto s2 = std::make_shared<const RiemannianSpace>(RiemannianSpace::round_sphere(2, 1.0));
    const auto fol = trivial_point_foliation(s2);
    const auto trace =
        integrate_geodesic(s2, Vec{{1.0, 0.0, 0.0}}, Vec{{0.0, 1.0, 0.0}}, 2.0);
    const auto sys = build_transversal_system(trace, fol);
    CHECK(sys.vertical.vertical_rank == 0);
    CHECK(sys.h_dim == 1);
    CHECK(sys.wtilde[0].cols() == 0);
  }
}

TEST_CASE("a-tensor closed forms") {
  SUBCASE("hopf at unit speed: |A(V)| = 1 for all t") {
    const auto fol = hopf_foliation();
    Rng rng(61);
    const Vec p = rng.unit_vector(4);
    const auto trace = integrate_geodesic(fol.parent, p, hopf_horizontal_direction(p, rng), 2.5);
    const auto sys = build_transversal_system(trace, fol);
    for (int k = 0; k < trace.nodes(); k += 409) {
      const Vec a = a_tensor_at(sys, k, Vec::Constant(1, 1.0));
      CHECK(std::abs(a.norm() - 1.0) < 1e-7);
    }
  }
  SUBCASE("parallel planes: totally geodesic vertical bundle has A = 0") {
    const auto fol = parallel_planes_foliation();
    const auto trace =
        integrate_geodesic(fol.parent, Vec{{0.0, 0.2, -0.4}}, Vec{{1.0, 0.0, 0.0}}, 2.0);
    const auto sys = build_transversal_system(trace, fol);
    CHECK(sys.h_dim == 0);  // codimension-1 foliation: no horizontal normal space
    // With H empty the A-tensor is trivially zero; check the vertical data
    // instead: derivatives of the translation restrictions vanish.
    for (int k = 0; k < trace.nodes(); k += 499)
      CHECK(sys.vertical.derivative[k].cwiseAbs().maxCoeff() < 1e-8);
  }
  SUBCASE("circles-x-line along radial lines: A = 0 with nontrivial H") {
    const auto fol = circles_x_line_foliation();
    const Vec start{{1.0, 0.0, 0.0}};
    Vec dir{{-1.0, 0.0, 0.6}};
    dir /= dir.norm();
    const auto trace = integrate_geodesic(fol.parent, start, dir, 0.8);
    const auto sys = build_transversal_system(trace, fol);
    CHECK(sys.h_dim == 1);
    for (int k = 0; k < trace.nodes(); k += 257)
      CHECK(sys.a_tensor[k].cwiseAbs().maxCoeff() < 1e-7);
  }
}

TEST_CASE("transversal curvature closed forms") {
  SUBCASE("hopf: R^H = 4 (O'Neill: K_base = K_total + 3|A|^2)") {
    const auto fol = hopf_foliation();
    Rng rng(67);
    for (int i = 0; i < 3; ++i) {
      const Vec p = rng.unit_vector(4);
      const auto trace =
          integrate_geodesic(fol.parent, p, hopf_horizontal_direction(p, rng), 1.5);
      const auto sys = build_transversal_system(trace, fol);
      for (int k = 0; k < trace.nodes(); k += 613) {
        CHECK(sys.r_h[k](0, 0) == doctest::Approx(4.0).epsilon(1e-5));
        const Vec y = Vec::Constant(1, 0.7);
        CHECK((transversal_curvature_at(sys, k, y) - 4.0 * y).norm() < 1e-5);
      }
    }
  }
  SUBCASE("euclidean trivial foliation: R^H = 0") {
    const auto e3 = std::make_shared<const RiemannianSpace>(RiemannianSpace::euclidean(3));
    const auto fol = trivial_point_foliation(e3);
    const auto trace = integrate_geodesic(e3, Vec{{0.0, 0.0, 0.0}}, Vec{{0.0, 1.0, 0.0}}, 2.0);
    const auto sys = build_transversal_system(trace, fol);
    CHECK(sys.h_dim == 2);
    for (int k = 0; k < trace.nodes(); k += 500)
      CHECK(sys.r_h[k].cwiseAbs().maxCoeff() < 1e-10);
  }
  SUBCASE("round 3-sphere point foliation: R^H = identity") {
    const auto s3 = std::make_shared<const RiemannianSpace>(RiemannianSpace::round_sphere(3, 1.0));
    const auto fol = trivial_point_foliation(s3);
    Vec p(4), v(4);
    p << 1.0, 0.0, 0.0, 0.0;
    v << 0.0, 0.0, 1.0, 0.0;
    const auto trace = integrate_geodesic(s3, p, v, 2.0);
    const auto sys = build_transversal_system(trace, fol);
    CHECK(sys.h_dim == 2);
    for (int k = 0; k < trace.nodes(); k += 500)
      CHECK((sys.r_h[k] - Mat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-8);
  }
  SUBCASE("R^H is symmetric along random hopf geodesics") {
    const auto fol = hopf_foliation();
    Rng rng(71);
    const Vec p = rng.unit_vector(4);
    const auto trace = integrate_geodesic(fol.parent, p, hopf_horizontal_direction(p, rng), 2.0);
    const auto sys = build_transversal_system(trace, fol);
    CHECK(sys.max_rh_asymmetry < 1e-8);
    CHECK(a_adjoint_defect(sys, rng) < 1e-9);
  }
}

TEST_CASE("horizontal index closed forms") {
  SUBCASE("hopf fiber, length in (pi/2, pi): one transversal zero") {
    Vec base(4);
    base << 1.0, 0.0, 0.0, 0.0;
    const auto fiber = hopf_fiber_patch(base);
    const auto fol = hopf_foliation();
    const double len = 0.75 * M_PI;
    CHECK(horizontal_index(fiber, Vec::Constant(1, 0.4), Vec{{len, 0.0}}, fol) == 1);
  }
  SUBCASE("concentric spheres radial: flat quotient ray, index 0") {
    const auto sph = sphere_patch(1.0);
    const auto fol = concentric_spheres_foliation(3);
    CHECK(horizontal_index(sph, Vec{{0.3, 0.4}}, Vec::Constant(1, -2.0), fol) == 0);
    CHECK(horizontal_index(sph, Vec{{1.2, -0.2}}, Vec::Constant(1, 0.7), fol) == 0);
  }
  SUBCASE("point foliation: transversal equation is the full Jacobi equation") {
    const auto s2 = std::make_shared<const RiemannianSpace>(RiemannianSpace::round_sphere(2, 1.0));
    const auto fol = trivial_point_foliation(s2);
    const auto pt = point_patch(s2, Vec{{1.0, 0.0, 0.0}});
    const double len = 1.5 * M_PI;  // in (pi, 2 pi)
    const int hor = horizontal_index(pt, Vec(0), Vec{{len, 0.0}}, fol);
    const auto basis = jacobi_basis(pt, Vec(0), Vec{{len, 0.0}}, 1.0);
    const int full = morse_index(detect_focal(basis, 0.0, 1.0));
    CHECK(hor == 1);
    CHECK(hor == full);
  }
}

TEST_CASE("index splitting examples") {
  SUBCASE("hopf fiber: 1 = 0 + 1") {
    Vec base(4);
    base << 0.5, 0.5, 0.5, 0.5;
    const auto fiber = hopf_fiber_patch(base);
    const auto fol = hopf_foliation();
    const auto report =
        verify_index_splitting(fiber, Vec::Constant(1, 1.0), Vec{{0.0, 0.8 * M_PI}}, fol);
    CHECK(report.ind_total == 1);
    CHECK(report.ind_vertical == 0);
    CHECK(report.ind_horizontal == 1);
    CHECK(report.holds);
  }
  SUBCASE("sphere through the origin: 2 = 2 + 0") {
    const auto sph = sphere_patch(1.0);
    const auto fol = concentric_spheres_foliation(3);
    const auto report =
        verify_index_splitting(sph, Vec{{0.7, -0.3}}, Vec::Constant(1, -2.0), fol);
    CHECK(report.ind_total == 2);
    CHECK(report.ind_vertical == 2);
    CHECK(report.ind_horizontal == 0);
    CHECK(report.holds);
  }
  SUBCASE("trivial foliation: ind = 0 + ind") {
    const auto s2 = std::make_shared<const RiemannianSpace>(RiemannianSpace::round_sphere(2, 1.0));
    const auto fol = trivial_point_foliation(s2);
    const auto pt = point_patch(s2, Vec{{0.0, 0.0, 1.0}});
    const auto report = verify_index_splitting(pt, Vec(0), Vec{{2.5 * M_PI, 0.0}}, fol);
    CHECK(report.ind_total == 2);
    CHECK(report.ind_vertical == 0);
    CHECK(report.ind_horizontal == 2);
    CHECK(report.holds);
  }
  SUBCASE("focal endpoint is rejected") {
    const auto s2 = std::make_shared<const RiemannianSpace>(RiemannianSpace::round_sphere(2, 1.0));
    const auto fol = trivial_point_foliation(s2);
    const auto pt = point_patch(s2, Vec{{0.0, 0.0, 1.0}});
    CHECK_THROWS_AS(verify_index_splitting(pt, Vec(0), Vec{{M_PI, 0.0}}, fol), DomainError);
  }
}

TEST_CASE("index splitting holds on randomized horizontal geodesics") {
  Rng rng(73);
  SUBCASE("hopf") {
    Vec base(4);
    base << 1.0, 0.0, 0.0, 0.0;
    const auto fiber = hopf_fiber_patch(base);
    const auto fol = hopf_foliation();
    for (int i = 0; i < 8; ++i) {
      const double len = rng.uniform(0.3, 2.8);
      if (std::fmod(len, M_PI / 2) < 0.08 || std::fmod(len, M_PI / 2) > M_PI / 2 - 0.08) continue;
      const double ang = rng.uniform(0.0, 2.0 * M_PI);
      const Vec coeffs{{len * std::cos(ang), len * std::sin(ang)}};
      const auto report =
          verify_index_splitting(fiber, Vec::Constant(1, rng.uniform(0.0, 6.2)), coeffs, fol);
      CHECK(report.holds);
      CHECK(report.ind_vertical == 0);
    }
  }
  SUBCASE("concentric spheres R^3") {
    const auto fol = concentric_spheres_foliation(3);
    for (int i = 0; i < 8; ++i) {
      const double r0 = rng.uniform(0.5, 1.5);
      const auto sph = sphere_patch(r0);
      const double len = rng.uniform(0.3, 2.5);
      if (std::abs(len - r0) < 0.08) continue;  // endpoint near the focal center
      const double sign = rng.uniform(0.0, 1.0) < 0.7 ? -1.0 : 1.0;
      const Vec u{{rng.uniform(0.0, 2.0 * M_PI), rng.uniform(-1.0, 1.0)}};
      const auto report = verify_index_splitting(sph, u, Vec::Constant(1, sign * len), fol);
      CHECK(report.holds);
      const bool crossed = sign < 0.0 && len > r0;
      CHECK(report.ind_vertical == (crossed ? 2 : 0));
      CHECK(report.ind_horizontal == 0);
    }
  }
  SUBCASE("circles-x-line") {
    const auto fol = circles_x_line_foliation();
    for (int i = 0; i < 8; ++i) {
      const double r0 = rng.uniform(0.4, 1.3);
      const double z0 = rng.uniform(-1.0, 1.0);
      const auto circ = circle_in_r3_patch(r0, z0);
      const double len = rng.uniform(0.3, 2.5);
      const double alpha = rng.uniform(-1.2, 1.2);  // tilt toward/away from the axis
      const Vec coeffs{{-len * std::cos(alpha), len * std::sin(alpha)}};
      const double reach = len * std::cos(alpha);
      if (std::abs(reach - r0) < 0.08) continue;
      const auto report =
          verify_index_splitting(circ, Vec::Constant(1, rng.uniform(0.0, 6.2)), coeffs, fol);
      CHECK(report.holds);
      CHECK(report.ind_vertical == ((reach > r0) ? 1 : 0));
      CHECK(report.ind_horizontal == 0);
    }
  }
}

TEST_CASE("submersion index coincidence for the hopf fibration") {
  Vec base(4);
  base << 1.0, 0.0, 0.0, 0.0;
  const auto fiber = hopf_fiber_patch(base);
  const auto fol = hopf_foliation();
  const auto s2_half =
      std::make_shared<const RiemannianSpace>(RiemannianSpace::round_sphere(2, 0.5));
  Rng rng(79);
  for (int i = 0; i < 6; ++i) {
    const double len = rng.uniform(0.2, 2.0 * M_PI);
    if (std::fmod(len, M_PI / 2) < 0.06 || std::fmod(len, M_PI / 2) > M_PI / 2 - 0.06) continue;
    const double theta = rng.uniform(0.0, 2.0 * M_PI);
    const double ang = rng.uniform(0.0, 2.0 * M_PI);
    const Vec coeffs{{len * std::cos(ang), len * std::sin(ang)}};
    const int hor = horizontal_index(fiber, Vec::Constant(1, theta), coeffs, fol);

    // Independent computation in the base: point source on sphere(2, 1/2).
    const Vec start = fiber.point_at(Vec::Constant(1, theta));
    const Vec bp = fol.quotient->project(start);
    const auto pt = point_patch(s2_half, bp);
    const auto basis = jacobi_basis(pt, Vec(0), Vec{{len, 0.0}}, 1.0);
    const int base_index = morse_index(detect_focal(basis, 0.0, 1.0));
    CHECK(hor == base_index);
  }
}

TEST_CASE("horizontal index is independent of the complement choice") {
  Vec base(4);
  base << 1.0, 0.0, 0.0, 0.0;
  const auto fiber = hopf_fiber_patch(base);
  const auto fol = hopf_foliation();
  const Vec coeffs{{0.6 * M_PI, 0.55 * M_PI}};
  const int deterministic = horizontal_index(fiber, Vec::Constant(1, 0.2), coeffs, fol);
  Rng rng(83);
  for (int i = 0; i < 3; ++i) {
    const int randomized =
        horizontal_index(fiber, Vec::Constant(1, 0.2), coeffs, fol, {}, &rng);
    CHECK(randomized == deterministic);
  }
}

TEST_CASE("intrinsicality: matched quotient projections give equal horizontal indices") {
  // Concentric circles in R^2 and concentric spheres in R^3 share the flat
  // ray quotient; geodesics with identical quotient projections must have
  // identical horizontal indices.
  const auto fol2 = concentric_spheres_foliation(2);
  const auto fol3 = concentric_spheres_foliation(3);
  Rng rng(89);
  for (int i = 0; i < 6; ++i) {
    const double r0 = rng.uniform(0.5, 1.4);
    const double len = rng.uniform(0.3, 2.4);
    if (std::abs(len - r0) < 0.08) continue;
    const auto circ = circle_patch(r0);
    const auto sph = sphere_patch(r0);
    const int h2 = horizontal_index(circ, Vec::Constant(1, rng.uniform(0.0, 6.2)),
                                    Vec::Constant(1, -len), fol2);
    const int h3 =
        horizontal_index(sph, Vec{{rng.uniform(0.0, 6.2), rng.uniform(-1.0, 1.0)}},
                         Vec::Constant(1, -len), fol3);
    CHECK(h2 == h3);
  }
}
