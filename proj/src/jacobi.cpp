#include "focalforge/jacobi.hpp"

#include "rank_scan.hpp"
#include "rk45.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ff {

namespace {

struct Layout {
  int e = 0;  // embedding dimension
  int m = 0;  // basis count
  int x0 = 0, v0 = 0, f0 = 0, y0 = 0, d0 = 0, total = 0;
  explicit Layout(int e_, int m_) : e(e_), m(m_) {
    x0 = 0;
    v0 = e;
    f0 = 2 * e;
    y0 = 2 * e + m * e;
    d0 = y0 + m * m;
    total = d0 + m * m;
  }
};

Mat hermite_mat(const std::vector<double>& times, const std::vector<Mat>& val,
                const std::vector<Mat>& der, double t) {
  const int n = static_cast<int>(times.size());
  if (t <= times.front()) return val.front();
  if (t >= times.back()) return val.back();
  const double dt = times[1] - times[0];
  int k = std::min(n - 2, static_cast<int>((t - times.front()) / dt));
  if (t < times[k]) --k;
  const double span = times[k + 1] - times[k];
  const double s = (t - times[k]) / span;
  const double s2 = s * s, s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1;
  const double h10 = (s3 - 2 * s2 + s) * span;
  const double h01 = -2 * s3 + 3 * s2;
  const double h11 = (s3 - s2) * span;
  return h00 * val[k] + h10 * der[k] + h01 * val[k + 1] + h11 * der[k + 1];
}

}  // namespace

Mat JacobiBasisTrace::value_at(double t) const {
  return hermite_mat(geodesic.times, value, derivative, t);
}

Mat JacobiBasisTrace::derivative_at(double t) const {
  // Second derivative of the value matrix is -R~ J, available per node.
  std::vector<Mat> second(value.size());
  for (size_t k = 0; k < value.size(); ++k) second[k] = -curvature[k] * value[k];
  return hermite_mat(geodesic.times, derivative, second, t);
}

double JacobiBasisTrace::symplectic_drift() const {
  const Mat omega0 = derivative[0].transpose() * value[0] - value[0].transpose() * derivative[0];
  double drift = 0.0;
  for (size_t k = 1; k < value.size(); ++k) {
    const Mat omega =
        derivative[k].transpose() * value[k] - value[k].transpose() * derivative[k];
    drift = std::max(drift, (omega - omega0).cwiseAbs().maxCoeff());
  }
  return drift;
}

double JacobiBasisTrace::jacobi_residual() const {
  const int n = static_cast<int>(value.size());
  if (n < 5) return 0.0;
  double res = 0.0;
  for (int k = 2; k + 2 < n; ++k) {
    const double dt = geodesic.times[k + 1] - geodesic.times[k];
    // Five-point second derivative keeps the stencil truncation below the
    // 1e-6 budget at the speeds the suite uses.
    const Mat second = (-value[k - 2] + 16.0 * value[k - 1] - 30.0 * value[k] +
                        16.0 * value[k + 1] - value[k + 2]) /
                       (12.0 * dt * dt);
    res = std::max(res, (second + curvature[k] * value[k]).cwiseAbs().maxCoeff());
  }
  return res;
}

JacobiBasisTrace jacobi_basis(const SubmanifoldPatch& patch, const Vec& u, const Vec& coeffs,
                              double horizon, const NumericParams& params, bool dense) {
  const RiemannianSpace& sp = *patch.parent;
  const int e = sp.embedding_dimension();
  const int dim = sp.dimension();
  const int m = dim - 1;
  const int ell = patch.leaf_dimension;

  const Vec p = patch.point_at(u);
  const Vec v = patch.normal_vector(u, coeffs);
  const double vnorm = sp.norm(p, v);
  if (vnorm <= 0.0) throw DomainError("jacobi_basis: zero normal vector");
  const Vec vhat = v / vnorm;

  // Initial frame: tangent frame first, then normals orthogonal to v.
  Mat frame0(e, m);
  {
    const std::vector<Vec> tangents = patch.tangent_frame(u);
    if (static_cast<int>(tangents.size()) != ell)
      throw DomainError("jacobi_basis: tangent frame size mismatch");
    for (int a = 0; a < ell; ++a) frame0.col(a) = tangents[a];
    std::vector<Vec> accepted{vhat};
    for (int a = 0; a < ell; ++a) accepted.push_back(tangents[a]);
    int filled = ell;
    for (const Vec& n : patch.normal_frame(u)) {
      Vec cand = n;
      for (const Vec& acc : accepted) cand -= sp.inner(p, cand, acc) * acc;
      const double norm = sp.norm(p, cand);
      if (norm > 1e-8) {
        cand /= norm;
        accepted.push_back(cand);
        if (filled >= m) throw DomainError("jacobi_basis: frame dimension mismatch");
        frame0.col(filled++) = cand;
      }
    }
    if (filled != m) throw DomainError("jacobi_basis: could not complete the normal frame");
  }

  // L-Jacobi seeds. S_v scales with the speed |v|.
  Mat y0 = Mat::Zero(m, m);
  Mat d0 = Mat::Zero(m, m);
  if (ell > 0) {
    const Mat s = vnorm * shape_operator(patch, u, vhat);
    y0.topLeftCorner(ell, ell) = Mat::Identity(ell, ell);
    d0.topLeftCorner(ell, ell) = -s;
  }
  d0.bottomRightCorner(m - ell, m - ell) = Mat::Identity(m - ell, m - ell);

  const Layout lay(e, m);
  Vec state(lay.total);
  state.segment(lay.x0, e) = p;
  state.segment(lay.v0, e) = v;
  for (int a = 0; a < m; ++a) state.segment(lay.f0 + a * e, e) = frame0.col(a);
  for (int b = 0; b < m; ++b) state.segment(lay.y0 + b * m, m) = y0.col(b);
  for (int b = 0; b < m; ++b) state.segment(lay.d0 + b * m, m) = d0.col(b);

  JacobiBasisTrace out;
  out.basis_count = m;
  out.tangent_seeded = ell;
  out.geodesic.space = patch.parent;
  out.geodesic.horizon = horizon;

  // Fast paths: flat spaces have no curvature terms at all; round spheres
  // have the closed-form frame curvature kappa (|v|^2 I - s s^T) with
  // s_a = <E_a, v>. Chart metrics and curved products take the generic path.
  const bool flat = sp.flat();
  const bool sphere = sp.kind() == RiemannianSpace::Kind::RoundSphere;
  const double r2inv = sphere ? 1.0 / (sp.radius() * sp.radius()) : 0.0;
  Vec s_buf(m);

  auto frame_curvature = [&sp, &lay, flat, sphere, r2inv](const Vec& st, Mat& rt) {
    if (flat) {
      rt.setZero();
      return;
    }
    if (sphere) {
      const auto vel = st.segment(lay.v0, lay.e);
      const double v2 = vel.squaredNorm();
      for (int a = 0; a < lay.m; ++a)
        for (int b = 0; b < lay.m; ++b) {
          const double sa = st.segment(lay.f0 + a * lay.e, lay.e).dot(vel);
          const double sb = st.segment(lay.f0 + b * lay.e, lay.e).dot(vel);
          rt(a, b) = r2inv * ((a == b ? v2 : 0.0) - sa * sb);
        }
      return;
    }
    const Vec x = st.segment(lay.x0, lay.e);
    const Vec vel = st.segment(lay.v0, lay.e);
    for (int b = 0; b < lay.m; ++b) {
      const Vec rb = sp.curvature_unchecked(x, st.segment(lay.f0 + b * lay.e, lay.e), vel);
      for (int a = 0; a < lay.m; ++a)
        rt(a, b) = sp.inner(x, rb, st.segment(lay.f0 + a * lay.e, lay.e));
    }
  };

  Mat rt(m, m);
  auto rhs = [&](double, const Vec& st, Vec& dy) {
    const auto x = st.segment(lay.x0, e);
    const auto vel = st.segment(lay.v0, e);
    dy.segment(lay.x0, e) = vel;
    Eigen::Map<const Mat> yv(st.data() + lay.y0, m, m);
    Eigen::Map<const Mat> yd(st.data() + lay.d0, m, m);
    Eigen::Map<Mat>(dy.data() + lay.y0, m, m) = yd;
    if (flat) {
      dy.segment(lay.v0, e + m * e).setZero();
      Eigen::Map<Mat>(dy.data() + lay.d0, m, m).setZero();
      return;
    }
    if (sphere) {
      const double v2 = vel.squaredNorm();
      dy.segment(lay.v0, e).noalias() = (-r2inv * v2) * x;
      for (int a = 0; a < m; ++a) {
        const auto ea = st.segment(lay.f0 + a * e, e);
        s_buf[a] = ea.dot(vel);
        dy.segment(lay.f0 + a * e, e).noalias() = (-r2inv * s_buf[a]) * x;
      }
      // Yd' = -kappa ((v2 I - s s^T) Y)
      Eigen::Map<Mat> out(dy.data() + lay.d0, m, m);
      out.noalias() = s_buf * (s_buf.transpose() * yv);
      out -= v2 * yv;
      out *= r2inv;
      return;
    }
    dy.segment(lay.v0, e) = sp.geodesic_acceleration(x, vel);
    for (int a = 0; a < m; ++a)
      dy.segment(lay.f0 + a * e, e) =
          sp.parallel_transport_rhs(x, vel, st.segment(lay.f0 + a * e, e));
    frame_curvature(st, rt);
    Eigen::Map<Mat>(dy.data() + lay.d0, m, m).noalias() = -rt * yv;
  };
  auto project = [&](Vec& st) {
    if (flat) return;
    Vec x = st.segment(lay.x0, e), vel = st.segment(lay.v0, e);
    sp.project(x, vel);
    st.segment(lay.x0, e) = x;
    st.segment(lay.v0, e) = vel;
    for (int a = 0; a < m; ++a) {
      Vec xc = x, fa = st.segment(lay.f0 + a * e, e);
      sp.project(xc, fa);
      st.segment(lay.f0 + a * e, e) = fa;
    }
  };
  auto record = [&](double t, const Vec& st) {
    out.geodesic.times.push_back(t);
    out.geodesic.position.push_back(st.segment(lay.x0, e));
    out.geodesic.velocity.push_back(st.segment(lay.v0, e));
    Mat f(e, m);
    for (int a = 0; a < m; ++a) f.col(a) = st.segment(lay.f0 + a * e, e);
    out.frame.push_back(std::move(f));
    out.value.push_back(Eigen::Map<const Mat>(st.data() + lay.y0, m, m));
    out.derivative.push_back(Eigen::Map<const Mat>(st.data() + lay.d0, m, m));
    Mat r(m, m);
    frame_curvature(st, r);
    out.curvature.push_back(0.5 * (r + r.transpose()));
  };

  const long nodes =
      dense ? std::max<long>(1, static_cast<long>(std::ceil(horizon * params.nodes_per_unit)))
            : 0;
  const detail::StepStats stats =
      detail::rk45_integrate(rhs, state, horizon, params.ode_tol, nodes, project, record);
  out.geodesic.control = {stats.accepted, stats.rejected, stats.min_step, stats.max_step,
                          stats.tolerance};
  return out;
}

FrameTrace parallel_frame_trace(std::shared_ptr<const RiemannianSpace> space, const Vec& point,
                                const Vec& velocity, double horizon,
                                const NumericParams& params) {
  const RiemannianSpace& sp = *space;
  const int e = sp.embedding_dimension();
  const int m = sp.dimension() - 1;
  sp.check_point(point);
  sp.check_tangent(point, velocity);
  const double speed = sp.norm(point, velocity);
  if (speed <= 0.0) throw DomainError("parallel_frame_trace: zero velocity");

  const Mat frame0 = normal_space_basis(sp, point, velocity / speed);

  const int f0 = 2 * e;
  Vec state(2 * e + m * e);
  state.head(e) = point;
  state.segment(e, e) = velocity;
  for (int a = 0; a < m; ++a) state.segment(f0 + a * e, e) = frame0.col(a);

  FrameTrace out;
  out.geodesic.space = space;
  out.geodesic.horizon = horizon;

  const bool flat = sp.flat();
  const bool sphere = sp.kind() == RiemannianSpace::Kind::RoundSphere;
  const double r2inv = sphere ? 1.0 / (sp.radius() * sp.radius()) : 0.0;
  auto rhs = [&sp, e, m, f0, flat, sphere, r2inv](double, const Vec& st, Vec& dy) {
    const auto x = st.head(e);
    const auto vel = st.segment(e, e);
    dy.head(e) = vel;
    if (flat) {
      dy.segment(e, e + m * e).setZero();
      return;
    }
    if (sphere) {
      const double v2 = vel.squaredNorm();
      dy.segment(e, e).noalias() = (-r2inv * v2) * x;
      for (int a = 0; a < m; ++a)
        dy.segment(f0 + a * e, e).noalias() =
            (-r2inv * st.segment(f0 + a * e, e).dot(vel)) * x;
      return;
    }
    dy.segment(e, e) = sp.geodesic_acceleration(x, vel);
    for (int a = 0; a < m; ++a)
      dy.segment(f0 + a * e, e) = sp.parallel_transport_rhs(x, vel, st.segment(f0 + a * e, e));
  };
  auto project = [&sp, e, m, f0, flat](Vec& st) {
    if (flat) return;
    Vec x = st.head(e), vel = st.segment(e, e);
    sp.project(x, vel);
    st.head(e) = x;
    st.segment(e, e) = vel;
    for (int a = 0; a < m; ++a) {
      Vec xc = x, fa = st.segment(f0 + a * e, e);
      sp.project(xc, fa);
      st.segment(f0 + a * e, e) = fa;
    }
  };
  auto record = [&](double t, const Vec& st) {
    const Vec x = st.head(e);
    const Vec vel = st.segment(e, e);
    out.geodesic.times.push_back(t);
    out.geodesic.position.push_back(x);
    out.geodesic.velocity.push_back(vel);
    Mat f(e, m);
    for (int a = 0; a < m; ++a) f.col(a) = st.segment(f0 + a * e, e);
    Mat r(m, m);
    for (int b = 0; b < m; ++b) {
      const Vec rb = sp.curvature_unchecked(x, f.col(b), vel);
      for (int a = 0; a < m; ++a) r(a, b) = sp.inner(x, rb, f.col(a));
    }
    out.frame.push_back(std::move(f));
    out.curvature.push_back(0.5 * (r + r.transpose()));
  };

  const long nodes =
      std::max<long>(1, static_cast<long>(std::ceil(horizon * params.nodes_per_unit)));
  const detail::StepStats stats =
      detail::rk45_integrate(rhs, state, horizon, params.ode_tol, nodes, project, record);
  out.geodesic.control = {stats.accepted, stats.rejected, stats.min_step, stats.max_step,
                          stats.tolerance};
  return out;
}

std::vector<FocalRecord> detect_focal(const JacobiBasisTrace& basis, double t_lo, double t_hi,
                                      const NumericParams& params) {
  const auto drops = detail::scan_rank_drops(basis.geodesic.times, basis.value, basis.derivative,
                                             t_lo, t_hi, params);
  std::vector<FocalRecord> records;
  records.reserve(drops.size());
  const double isolation = 50.0 * (basis.geodesic.times[1] - basis.geodesic.times[0]);
  for (const auto& drop : drops) {
    FocalRecord rec;
    rec.time = drop.time;
    rec.multiplicity = drop.corank;
    rec.smallest_retained_sv = drop.smallest_retained;
    rec.largest_discarded_sv = drop.largest_discarded;
    // Detection-level proxy for membership in C_R: the crossing is isolated
    // and the vanishing combinations cross transversally (their derivatives
    // stay independent). Ray-neighborhood confirmation is done by the
    // profile and linking operations.
    bool isolated = true;
    for (const auto& other : drops)
      if (&other != &drop && std::abs(other.time - drop.time) < isolation) isolated = false;
    bool transversal = true;
    {
      const Mat y = basis.value_at(drop.time);
      const Mat yd = basis.derivative_at(drop.time);
      Eigen::JacobiSVD<Mat> svd(y, Eigen::ComputeFullV);
      Mat kernel(y.cols(), drop.corank);
      for (int j = 0; j < drop.corank; ++j)
        kernel.col(j) = svd.matrixV().col(y.cols() - 1 - j);
      const Vec sv = detail::matrix_singular_values(yd * kernel);
      double dscale = yd.cwiseAbs().maxCoeff();
      transversal = sv[drop.corank - 1] > 1e-6 * std::max(1.0, dscale);
    }
    rec.regular = isolated && transversal;
    records.push_back(rec);
  }
  return records;
}

int morse_index(const std::vector<FocalRecord>& records, double open_end,
                const NumericParams& params) {
  int index = 0;
  for (const FocalRecord& rec : records)
    if (rec.time > 0.0 && rec.time < open_end - params.endpoint_tol) index += rec.multiplicity;
  return index;
}

int nullity_at_endpoint(const std::vector<FocalRecord>& records, double end,
                        const NumericParams& params) {
  for (const FocalRecord& rec : records)
    if (std::abs(rec.time - end) <= params.endpoint_tol) return rec.multiplicity;
  return 0;
}

FocalProfile focal_time_profile(const SubmanifoldPatch& patch,
                                const std::vector<std::pair<Vec, Vec>>& samples, int k,
                                double horizon, const NumericParams& params) {
  FocalProfile profile;
  profile.horizon = horizon;
  profile.entries.reserve(samples.size());

  for (const auto& [u, dir] : samples) {
    FocalProfileEntry entry;
    entry.parameter = u;
    entry.direction = dir;
    if (std::abs(dir.norm() - 1.0) > 1e-9) throw DomainError("profile samples must be unit normals");
    try {
      const JacobiBasisTrace basis = jacobi_basis(patch, u, dir, horizon, params);
      const std::vector<FocalRecord> records = detect_focal(basis, 0.0, horizon, params);
      bool regular = true;
      for (const FocalRecord& rec : records) {
        if (static_cast<int>(entry.times.size()) < k) {
          entry.times.push_back(rec.time);
          entry.multiplicities.push_back(rec.multiplicity);
        }
        regular = regular && rec.regular;
      }
      entry.regular_segment = regular;
    } catch (const std::exception& ex) {
      entry.failed = true;
      entry.error = ex.what();
    }
    profile.entries.push_back(std::move(entry));
  }

  // Discrete continuity certificate over adjacent samples; crossing counts
  // near the horizon boundary are ignored for the count comparison.
  const double margin = 1e-3 * horizon;
  double kmax = 0.0;
  for (size_t i = 0; i + 1 < profile.entries.size(); ++i) {
    FocalProfileEntry& a = profile.entries[i];
    FocalProfileEntry& b = profile.entries[i + 1];
    if (a.failed || b.failed) continue;
    const Vec pa = patch.normal_vector(a.parameter, a.direction);
    const Vec pb = patch.normal_vector(b.parameter, b.direction);
    const Vec qa = patch.point_at(a.parameter), qb = patch.point_at(b.parameter);
    const double delta = std::max(1e-12, (pb - pa).norm() + (qb - qa).norm());
    const size_t common = std::min(a.times.size(), b.times.size());
    for (size_t j = 0; j < common; ++j)
      kmax = std::max(kmax, std::abs(a.times[j] - b.times[j]) / delta);
    auto count_interior = [&](const FocalProfileEntry& ent) {
      int c = 0;
      for (double t : ent.times)
        if (t < horizon - margin) ++c;
      return c;
    };
    if (count_interior(a) != count_interior(b)) {
      a.regular_segment = false;
      b.regular_segment = false;
    }
  }
  profile.empirical_k = kmax;
  return profile;
}

}  // namespace ff
