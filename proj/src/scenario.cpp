#include "focalforge/scenario.hpp"

#include "focalforge/taut.hpp"

#include <cmath>
#include <memory>

namespace ff {

namespace {

std::shared_ptr<const RiemannianSpace> shared_space(RiemannianSpace s) {
  return std::make_shared<const RiemannianSpace>(std::move(s));
}

std::vector<Scenario> build_registry() {
  std::vector<Scenario> registry;

  {
    Scenario s;
    s.id = "sphere-point-s2";
    s.description = "point source on the round 2-sphere; geodesics to a generic target";
    s.betti_id = "omega-s2";
    s.make_patch = [] {
      return point_patch(shared_space(RiemannianSpace::round_sphere(2, 1.0)),
                         Vec{{1.0, 0.0, 0.0}});
    };
    s.default_target = Vec{{std::cos(1.0), std::sin(1.0), 0.0}};
    s.default_cap = std::pow(4.0 * M_PI, 2);
    s.default_horizon = 3.5 * M_PI;
    s.default_u = Vec(0);
    s.default_cycle_c = Vec{{2.5 * M_PI, 0.0}};
    s.default_focal_c = Vec{{M_PI, 0.0}};
    s.default_bott_target = Vec{{-1.0, 0.0, 0.0}};
    registry.push_back(std::move(s));
  }
  {
    Scenario s;
    s.id = "sphere-point-s3";
    s.description = "point source on the round 3-sphere";
    s.betti_id = "omega-s3";
    s.make_patch = [] {
      Vec p(4);
      p << 1.0, 0.0, 0.0, 0.0;
      return point_patch(shared_space(RiemannianSpace::round_sphere(3, 1.0)), p);
    };
    Vec q(4);
    q << std::cos(1.2), std::sin(1.2), 0.0, 0.0;
    s.default_target = q;
    s.default_cap = std::pow(3.2 * M_PI, 2);
    s.default_horizon = 3.5 * M_PI;
    s.default_u = Vec(0);
    s.default_cycle_c = Vec{{2.5 * M_PI, 0.0, 0.0}};
    s.default_focal_c = Vec{{M_PI, 0.0, 0.0}};
    Vec anti(4);
    anti << -1.0, 0.0, 0.0, 0.0;
    s.default_bott_target = anti;
    registry.push_back(std::move(s));
  }
  {
    Scenario s;
    s.id = "sphere-point-s4";
    s.description = "point source on the round 4-sphere (focal scans only)";
    s.betti_id = "omega-s4";
    s.make_patch = [] {
      Vec p(5);
      p << 1.0, 0.0, 0.0, 0.0, 0.0;
      return point_patch(shared_space(RiemannianSpace::round_sphere(4, 1.0)), p);
    };
    s.default_horizon = 3.5 * M_PI;
    s.supports_shooting = false;  // seed grids cover normal rank <= 3
    s.default_u = Vec(0);
    s.default_cycle_c = Vec{{2.5 * M_PI, 0.0, 0.0, 0.0}};
    s.default_focal_c = Vec{{M_PI, 0.0, 0.0, 0.0}};
    registry.push_back(std::move(s));
  }
  {
    Scenario s;
    s.id = "circle-in-plane";
    s.description = "unit circle in the Euclidean plane";
    s.betti_id = "s1-in-r2";
    s.make_patch = [] { return circle_patch(1.0); };
    s.make_foliation = [] { return concentric_spheres_foliation(2); };
    s.default_target = Vec{{0.5, 0.0}};
    s.default_cap = 9.0;
    s.default_horizon = 3.0;
    s.default_u = Vec::Constant(1, 0.0);
    s.default_cycle_c = Vec::Constant(1, -1.5);
    s.default_focal_c = Vec::Constant(1, -1.0);
    registry.push_back(std::move(s));
  }
  {
    Scenario s;
    s.id = "sphere-in-r3";
    s.description = "unit sphere in Euclidean 3-space (concentric-spheres leaf)";
    s.betti_id = "s2-in-r3";
    s.make_patch = [] { return sphere_patch(1.0); };
    s.make_foliation = [] { return concentric_spheres_foliation(3); };
    s.default_target = Vec{{0.25, 0.12, 0.08}};
    s.default_cap = 9.0;
    s.default_horizon = 3.0;
    s.default_u = Vec{{0.6, 0.2}};
    s.default_cycle_c = Vec::Constant(1, -2.0);
    s.default_focal_c = Vec::Constant(1, -1.0);
    registry.push_back(std::move(s));
  }
  {
    Scenario s;
    s.id = "hopf-fiber";
    s.description = "Hopf fiber circle in the round 3-sphere";
    s.betti_id = "hopf-fiber";
    s.make_patch = [] {
      Vec p(4);
      p << 1.0, 0.0, 0.0, 0.0;
      return hopf_fiber_patch(p);
    };
    s.make_foliation = [] { return hopf_foliation(); };
    {
      const FoliationSpec fol = hopf_foliation();
      const Vec base = 0.5 * Vec{{std::cos(0.8), std::sin(0.8), 0.0}};
      s.default_target = build_saturated_preimage(fol, base).point_at(Vec::Constant(1, 0.7));
    }
    s.default_cap = std::pow(1.7 * M_PI, 2);
    s.default_horizon = 1.6 * M_PI;
    s.default_u = Vec::Constant(1, 0.3);
    s.default_cycle_c = Vec{{0.8 * M_PI, 0.0}};
    s.default_focal_c = Vec{{0.5 * M_PI, 0.0}};
    registry.push_back(std::move(s));
  }
  {
    Scenario s;
    s.id = "circles-x-line";
    s.description = "circles about the z-axis at each height in R^3";
    s.make_patch = [] { return circle_in_r3_patch(1.0, 0.0); };
    s.make_foliation = [] { return circles_x_line_foliation(); };
    s.default_target = Vec{{0.3, 0.0, 0.4}};
    s.default_cap = 9.0;
    s.default_horizon = 3.0;
    s.default_u = Vec::Constant(1, 0.0);
    s.default_cycle_c = Vec{{-1.5, 0.4}};
    registry.push_back(std::move(s));
  }
  {
    Scenario s;
    s.id = "ellipse-plane";
    s.description = "ellipse with semi-axes 2 and 1 in the plane (focal profiles)";
    s.make_patch = [] { return ellipse_patch(2.0, 1.0); };
    s.default_horizon = 5.0;
    s.default_target = Vec{{0.3, 0.2}};
    s.default_cap = 36.0;
    s.default_u = Vec::Constant(1, 0.8);
    registry.push_back(std::move(s));
  }
  {
    Scenario s;
    s.id = "hyperplane-r3";
    s.description = "coordinate hyperplane in Euclidean 3-space";
    s.betti_id = "hyperplane";
    s.make_patch = [] { return hyperplane_patch(3); };
    s.default_target = Vec{{0.4, -0.7, 2.3}};
    s.default_cap = 36.0;
    s.default_horizon = 3.0;
    s.default_u = Vec{{0.0, 0.0}};
    registry.push_back(std::move(s));
  }
  return registry;
}

}  // namespace

const std::vector<Scenario>& scenario_registry() {
  static const std::vector<Scenario> registry = build_registry();
  return registry;
}

const Scenario& find_scenario(const std::string& id) {
  for (const Scenario& s : scenario_registry())
    if (s.id == id) return s;
  throw DomainError("unknown scenario '" + id + "'");
}

}  // namespace ff
