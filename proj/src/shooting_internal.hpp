#pragma once

#include "focalforge/jacobi.hpp"
#include "rk45.hpp"

#include <Eigen/QR>

#include <cmath>
#include <limits>

namespace ff::detail {

/// Endpoint of the unit-parameter geodesic without storing a trace.
inline Vec geodesic_endpoint(const RiemannianSpace& sp, const Vec& point, const Vec& velocity,
                             const NumericParams& params) {
  const int e = sp.embedding_dimension();
  Vec y(2 * e);
  y.head(e) = point;
  y.tail(e) = velocity;
  const bool flat = sp.flat();
  const bool sphere = sp.kind() == RiemannianSpace::Kind::RoundSphere;
  const double r2inv = sphere ? 1.0 / (sp.radius() * sp.radius()) : 0.0;
  auto rhs = [&sp, e, flat, sphere, r2inv](double, const Vec& st, Vec& dy) {
    dy.head(e) = st.tail(e);
    if (flat) {
      dy.tail(e).setZero();
    } else if (sphere) {
      dy.tail(e).noalias() = (-r2inv * st.tail(e).squaredNorm()) * st.head(e);
    } else {
      dy.tail(e) = sp.geodesic_acceleration(st.head(e), st.tail(e));
    }
  };
  auto project = [&sp, e, flat](Vec& st) {
    if (flat) return;
    Vec p = st.head(e), v = st.tail(e);
    sp.project(p, v);
    st.head(e) = p;
    st.tail(e) = v;
  };
  Vec endpoint;
  rk45_integrate(rhs, y, 1.0, params.ode_tol, 0, project, [&](double t, const Vec& st) {
    if (t > 0.0) endpoint = st.head(e);
  });
  return endpoint;
}

/// Jacobian of (u, c) -> exp_perp(sum c_j n_j(u)) from an endpoint-only
/// L-Jacobi run: ambient columns assembled from the basis fields, the
/// normal-connection correction for parameter directions, and the radial
/// field for coefficient directions.
inline Mat shooting_jacobian(const SubmanifoldPatch& patch, const Vec& u, const Vec& c,
                             const JacobiBasisTrace& basis) {
  const RiemannianSpace& sp = *patch.parent;
  const int e = sp.embedding_dimension();
  const int ell = patch.leaf_dimension;
  const int k = patch.normal_rank();
  const int m = basis.basis_count;

  const Vec p0 = basis.geodesic.position.front();
  const Vec v = basis.geodesic.velocity.front();
  const double vnorm = sp.norm(p0, v);
  const Mat& frame0 = basis.frame.front();
  const Mat& frame1 = basis.frame.back();
  const Mat& y1 = basis.value.back();
  const Vec vel1 = basis.geodesic.velocity.back();

  const Mat ambient = frame1 * y1;  // e x m endpoint values of the basis fields

  Mat jac(e, ell + k);
  const double h = 1e-6;

  if (ell > 0) {
    Mat pjac(e, ell);
    Vec us = u;
    for (int a = 0; a < ell; ++a) {
      us[a] = u[a] + h;
      const Vec fp = patch.parametrization(us);
      us[a] = u[a] - h;
      const Vec fm = patch.parametrization(us);
      us[a] = u[a];
      pjac.col(a) = (fp - fm) / (2.0 * h);
    }
    Vec us2 = u;
    for (int a = 0; a < ell; ++a) {
      Vec col = Vec::Zero(e);
      for (int b = 0; b < ell; ++b)
        col += sp.inner(p0, frame0.col(b), pjac.col(a)) * ambient.col(b);
      us2[a] = u[a] + h;
      const Vec np = patch.normal_vector(us2, c);
      us2[a] = u[a] - h;
      const Vec nm = patch.normal_vector(us2, c);
      us2[a] = u[a];
      const Vec dv = (np - nm) / (2.0 * h);
      for (int j = ell; j < m; ++j) col += sp.inner(p0, dv, frame0.col(j)) * ambient.col(j);
      jac.col(a) = col;
    }
  }

  const std::vector<Vec> nframe = patch.normal_frame(u);
  const Vec vhat = v / vnorm;
  for (int j = 0; j < k; ++j) {
    const double alpha = sp.inner(p0, nframe[j], vhat);
    Vec col = (alpha / vnorm) * vel1;
    for (int l = ell; l < m; ++l)
      col += sp.inner(p0, nframe[j], frame0.col(l)) * ambient.col(l);
    jac.col(ell + j) = col;
  }
  return jac;
}

}  // namespace ff::detail
