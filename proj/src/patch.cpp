#include "focalforge/patch.hpp"

#include <cmath>
#include <sstream>

namespace ff {

Vec SubmanifoldPatch::normal_vector(const Vec& u, const Vec& c) const {
  const std::vector<Vec> frame = normal_frame(u);
  if (c.size() != static_cast<int>(frame.size()))
    throw DomainError("normal coefficient count does not match the normal frame");
  Vec v = Vec::Zero(parent->embedding_dimension());
  for (int j = 0; j < c.size(); ++j) v += c[j] * frame[j];
  return v;
}

double SubmanifoldPatch::frame_orthonormality_defect(const Vec& u) const {
  const Vec p = parametrization(u);
  std::vector<Vec> all = tangent_frame(u);
  for (const Vec& n : normal_frame(u)) all.push_back(n);
  const int m = static_cast<int>(all.size());
  double defect = 0.0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const double gram = parent->inner(p, all[i], all[j]);
      defect = std::max(defect, std::abs(gram - (i == j ? 1.0 : 0.0)));
    }
  return defect;
}

namespace {

// Ambient Jacobian of the parametrization by central differences.
Mat param_jacobian(const SubmanifoldPatch& patch, const Vec& u, double h) {
  const int ell = patch.leaf_dimension;
  Mat jac(patch.parent->embedding_dimension(), ell);
  Vec us = u;
  for (int a = 0; a < ell; ++a) {
    us[a] = u[a] + h;
    const Vec fp = patch.parametrization(us);
    us[a] = u[a] - h;
    const Vec fm = patch.parametrization(us);
    us[a] = u[a];
    jac.col(a) = (fp - fm) / (2.0 * h);
  }
  return jac;
}

}  // namespace

Mat shape_operator(const SubmanifoldPatch& patch, const Vec& parameter, const Vec& normal) {
  const int ell = patch.leaf_dimension;
  const Vec p = patch.parametrization(parameter);
  const double nu_norm = patch.parent->norm(p, normal);
  if (std::abs(nu_norm - 1.0) > 1e-9) {
    std::ostringstream msg;
    msg << "shape_operator: normal must be unit length, |nu| = " << nu_norm;
    throw DomainError(msg.str());
  }
  if (ell == 0) return Mat::Zero(0, 0);

  const double h = 1e-6;
  const std::vector<Vec> tangents = patch.tangent_frame(parameter);
  const Mat jac = param_jacobian(patch, parameter, h);

  // Parameter direction moving the point along each tangent frame vector.
  Mat du(ell, ell);
  {
    const Eigen::ColPivHouseholderQR<Mat> qr(jac);
    for (int a = 0; a < ell; ++a) du.col(a) = qr.solve(tangents[a]);
  }

  const bool chart = patch.parent->kind() == RiemannianSpace::Kind::ChartMetric;
  std::vector<Mat> gamma;
  if (chart) gamma = patch.parent->christoffel(p);

  Mat s(ell, ell);
  Vec us = parameter;
  for (int a = 0; a < ell; ++a) {
    for (int b = 0; b < ell; ++b) {
      us = parameter + h * du.col(a);
      const Vec tp = patch.tangent_frame(us)[b];
      us = parameter - h * du.col(a);
      const Vec tm = patch.tangent_frame(us)[b];
      Vec dtb = (tp - tm) / (2.0 * h);
      if (chart) {
        Vec corr(dtb.size());
        for (int k = 0; k < dtb.size(); ++k) corr[k] = tangents[a].dot(gamma[k] * tangents[b]);
        dtb += corr;
      }
      s(a, b) = patch.parent->inner(p, dtb, normal);
    }
  }
  const double asym = (s - s.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-8) {
    std::ostringstream msg;
    msg << "shape_operator: asymmetry " << asym << " exceeds 1e-8";
    throw DomainError(msg.str());
  }
  return 0.5 * (s + s.transpose());
}

SubmanifoldPatch hyperplane_patch(int n, double offset) {
  SubmanifoldPatch patch;
  patch.parent = std::make_shared<const RiemannianSpace>(RiemannianSpace::euclidean(n));
  patch.leaf_dimension = n - 1;
  patch.parametrization = [n, offset](const Vec& u) {
    Vec p(n);
    p.head(n - 1) = u;
    p[n - 1] = offset;
    return p;
  };
  patch.tangent_frame = [n](const Vec&) {
    std::vector<Vec> frame;
    for (int i = 0; i + 1 < n; ++i) frame.push_back(Vec::Unit(n, i));
    return frame;
  };
  patch.normal_frame = [n](const Vec&) { return std::vector<Vec>{Vec::Unit(n, n - 1)}; };
  patch.param_lo = Vec::Constant(n - 1, -10.0);
  patch.param_hi = Vec::Constant(n - 1, 10.0);
  patch.param_periodic.assign(n - 1, false);
  patch.name = "hyperplane";
  return patch;
}

SubmanifoldPatch circle_patch(double r) {
  SubmanifoldPatch patch;
  patch.parent = std::make_shared<const RiemannianSpace>(RiemannianSpace::euclidean(2));
  patch.leaf_dimension = 1;
  patch.parametrization = [r](const Vec& u) {
    return Vec{{r * std::cos(u[0]), r * std::sin(u[0])}};
  };
  patch.tangent_frame = [](const Vec& u) {
    return std::vector<Vec>{Vec{{-std::sin(u[0]), std::cos(u[0])}}};
  };
  patch.normal_frame = [](const Vec& u) {
    return std::vector<Vec>{Vec{{std::cos(u[0]), std::sin(u[0])}}};
  };
  patch.param_lo = Vec::Constant(1, 0.0);
  patch.param_hi = Vec::Constant(1, 2.0 * M_PI);
  patch.param_periodic.assign(1, true);
  patch.name = "circle";
  return patch;
}

SubmanifoldPatch sphere_patch(double r) {
  SubmanifoldPatch patch;
  patch.parent = std::make_shared<const RiemannianSpace>(RiemannianSpace::euclidean(3));
  patch.leaf_dimension = 2;
  // (theta, phi): longitude / latitude; frames degenerate only at the poles.
  patch.parametrization = [r](const Vec& u) {
    return Vec{{r * std::cos(u[0]) * std::cos(u[1]), r * std::sin(u[0]) * std::cos(u[1]),
                r * std::sin(u[1])}};
  };
  patch.tangent_frame = [](const Vec& u) {
    return std::vector<Vec>{
        Vec{{-std::sin(u[0]), std::cos(u[0]), 0.0}},
        Vec{{-std::cos(u[0]) * std::sin(u[1]), -std::sin(u[0]) * std::sin(u[1]), std::cos(u[1])}}};
  };
  patch.normal_frame = [](const Vec& u) {
    return std::vector<Vec>{Vec{{std::cos(u[0]) * std::cos(u[1]), std::sin(u[0]) * std::cos(u[1]),
                                 std::sin(u[1])}}};
  };
  patch.param_lo = Vec{{0.0, -M_PI / 2 + 1e-3}};
  patch.param_hi = Vec{{2.0 * M_PI, M_PI / 2 - 1e-3}};
  patch.param_periodic = {true, false};
  patch.name = "sphere";
  return patch;
}

SubmanifoldPatch circle_in_r3_patch(double r, double height) {
  SubmanifoldPatch patch;
  patch.parent = std::make_shared<const RiemannianSpace>(RiemannianSpace::euclidean(3));
  patch.leaf_dimension = 1;
  patch.parametrization = [r, height](const Vec& u) {
    return Vec{{r * std::cos(u[0]), r * std::sin(u[0]), height}};
  };
  patch.tangent_frame = [](const Vec& u) {
    return std::vector<Vec>{Vec{{-std::sin(u[0]), std::cos(u[0]), 0.0}}};
  };
  patch.normal_frame = [](const Vec& u) {
    return std::vector<Vec>{Vec{{std::cos(u[0]), std::sin(u[0]), 0.0}}, Vec{{0.0, 0.0, 1.0}}};
  };
  patch.param_lo = Vec::Constant(1, 0.0);
  patch.param_hi = Vec::Constant(1, 2.0 * M_PI);
  patch.param_periodic.assign(1, true);
  patch.name = "circle-in-r3";
  return patch;
}

SubmanifoldPatch point_patch(std::shared_ptr<const RiemannianSpace> space, const Vec& p) {
  space->check_point(p);
  SubmanifoldPatch patch;
  patch.parent = std::move(space);
  patch.leaf_dimension = 0;
  const Vec base = p;
  patch.parametrization = [base](const Vec&) { return base; };
  patch.tangent_frame = [](const Vec&) { return std::vector<Vec>{}; };
  const std::shared_ptr<const RiemannianSpace> parent = patch.parent;
  patch.normal_frame = [parent, base](const Vec&) {
    const Mat basis = parent->tangent_basis(base);
    std::vector<Vec> frame;
    for (int j = 0; j < basis.cols(); ++j) frame.push_back(basis.col(j));
    return frame;
  };
  patch.param_lo = Vec(0);
  patch.param_hi = Vec(0);
  patch.name = "point";
  return patch;
}

namespace {
// Quaternionic frame maps on R^4 = C^2, coordinates (Re z1, Im z1, Re z2, Im z2).
Vec quat_i(const Vec& p) { return Vec{{-p[1], p[0], -p[3], p[2]}}; }
Vec quat_j(const Vec& p) { return Vec{{-p[2], p[3], p[0], -p[1]}}; }
Vec quat_k(const Vec& p) { return Vec{{-p[3], -p[2], p[1], p[0]}}; }
}  // namespace

SubmanifoldPatch hopf_fiber_patch(const Vec& base_point) {
  if (base_point.size() != 4 || std::abs(base_point.norm() - 1.0) > 1e-9)
    throw DomainError("hopf_fiber_patch: base point must lie on the unit 3-sphere");
  SubmanifoldPatch patch;
  patch.parent = std::make_shared<const RiemannianSpace>(RiemannianSpace::round_sphere(3, 1.0));
  patch.leaf_dimension = 1;
  const Vec p0 = base_point;
  auto rotate = [p0](double t) {
    const double c = std::cos(t), s = std::sin(t);
    return Vec{{p0[0] * c - p0[1] * s, p0[0] * s + p0[1] * c, p0[2] * c - p0[3] * s,
                p0[2] * s + p0[3] * c}};
  };
  patch.parametrization = [rotate](const Vec& u) { return rotate(u[0]); };
  patch.tangent_frame = [rotate](const Vec& u) {
    return std::vector<Vec>{quat_i(rotate(u[0]))};
  };
  patch.normal_frame = [rotate](const Vec& u) {
    const Vec g = rotate(u[0]);
    return std::vector<Vec>{quat_j(g), quat_k(g)};
  };
  patch.param_lo = Vec::Constant(1, 0.0);
  patch.param_hi = Vec::Constant(1, 2.0 * M_PI);
  patch.param_periodic.assign(1, true);
  patch.name = "hopf-fiber";
  return patch;
}

SubmanifoldPatch ellipse_patch(double a, double b) {
  SubmanifoldPatch patch;
  patch.parent = std::make_shared<const RiemannianSpace>(RiemannianSpace::euclidean(2));
  patch.leaf_dimension = 1;
  patch.parametrization = [a, b](const Vec& u) {
    return Vec{{a * std::cos(u[0]), b * std::sin(u[0])}};
  };
  patch.tangent_frame = [a, b](const Vec& u) {
    Vec t{{-a * std::sin(u[0]), b * std::cos(u[0])}};
    return std::vector<Vec>{t / t.norm()};
  };
  patch.normal_frame = [a, b](const Vec& u) {
    Vec n{{b * std::cos(u[0]), a * std::sin(u[0])}};
    return std::vector<Vec>{n / n.norm()};
  };
  patch.param_lo = Vec::Constant(1, 0.0);
  patch.param_hi = Vec::Constant(1, 2.0 * M_PI);
  patch.param_periodic.assign(1, true);
  patch.name = "ellipse";
  return patch;
}

}  // namespace ff
