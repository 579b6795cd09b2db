#include "focalforge/geodesic.hpp"

#include "rk45.hpp"

#include <cmath>

namespace ff {

double GeodesicTrace::speed_drift() const {
  const double s0 = metric_speed(0);
  double drift = 0.0;
  for (int k = 1; k < nodes(); ++k)
    drift = std::max(drift, std::abs(metric_speed(k) - s0) / std::max(1e-300, s0));
  return drift;
}

double GeodesicTrace::max_constraint_residual() const {
  double r = 0.0;
  for (const Vec& p : position) r = std::max(r, space->constraint_residual(p));
  return r;
}

namespace {
// Hermite basis on [0,1].
inline void hermite_weights(double s, double dt, double& h00, double& h10, double& h01,
                            double& h11) {
  const double s2 = s * s, s3 = s2 * s;
  h00 = 2 * s3 - 3 * s2 + 1;
  h10 = (s3 - 2 * s2 + s) * dt;
  h01 = -2 * s3 + 3 * s2;
  h11 = (s3 - s2) * dt;
}
}  // namespace

Vec GeodesicTrace::position_at(double t) const {
  const int n = nodes();
  if (t <= times.front()) return position.front();
  if (t >= times.back()) return position.back();
  const double dt = times[1] - times[0];
  int k = std::min(n - 2, static_cast<int>((t - times.front()) / dt));
  if (t < times[k]) --k;
  const double s = (t - times[k]) / (times[k + 1] - times[k]);
  double h00, h10, h01, h11;
  hermite_weights(s, times[k + 1] - times[k], h00, h10, h01, h11);
  return h00 * position[k] + h10 * velocity[k] + h01 * position[k + 1] + h11 * velocity[k + 1];
}

Vec GeodesicTrace::velocity_at(double t) const {
  const int n = nodes();
  if (t <= times.front()) return velocity.front();
  if (t >= times.back()) return velocity.back();
  const double dt = times[1] - times[0];
  int k = std::min(n - 2, static_cast<int>((t - times.front()) / dt));
  if (t < times[k]) --k;
  const double s = (t - times[k]) / (times[k + 1] - times[k]);
  // Linear blend of node velocities is enough for velocity queries.
  return (1.0 - s) * velocity[k] + s * velocity[k + 1];
}

GeodesicTrace integrate_geodesic(std::shared_ptr<const RiemannianSpace> space, const Vec& point,
                                 const Vec& velocity, double horizon,
                                 const NumericParams& params) {
  if (horizon <= 0.0) throw DomainError("integrate_geodesic: horizon must be positive");
  space->check_point(point);
  space->check_tangent(point, velocity);

  const int e = space->embedding_dimension();
  GeodesicTrace trace;
  trace.space = space;
  trace.horizon = horizon;

  const long n_intervals =
      std::max<long>(1, static_cast<long>(std::ceil(horizon * params.nodes_per_unit)));
  trace.times.reserve(n_intervals + 1);
  trace.position.reserve(n_intervals + 1);
  trace.velocity.reserve(n_intervals + 1);

  Vec y(2 * e);
  y.head(e) = point;
  y.tail(e) = velocity;

  const RiemannianSpace& sp = *space;
  const bool flat = sp.flat();
  const bool sphere = sp.kind() == RiemannianSpace::Kind::RoundSphere;
  const double r2inv = sphere ? 1.0 / (sp.radius() * sp.radius()) : 0.0;
  auto rhs = [&sp, e, flat, sphere, r2inv](double, const Vec& state, Vec& dy) {
    dy.head(e) = state.tail(e);
    if (flat) {
      dy.tail(e).setZero();
    } else if (sphere) {
      dy.tail(e).noalias() = (-r2inv * state.tail(e).squaredNorm()) * state.head(e);
    } else {
      dy.tail(e) = sp.geodesic_acceleration(state.head(e), state.tail(e));
    }
  };
  auto project = [&sp, e, flat](Vec& state) {
    if (flat) return;
    Vec p = state.head(e), v = state.tail(e);
    sp.project(p, v);
    state.head(e) = p;
    state.tail(e) = v;
  };
  auto record = [&trace, e](double t, const Vec& state) {
    trace.times.push_back(t);
    trace.position.push_back(state.head(e));
    trace.velocity.push_back(state.tail(e));
  };

  const detail::StepStats stats =
      detail::rk45_integrate(rhs, y, horizon, params.ode_tol, n_intervals, project, record);
  trace.control = {stats.accepted, stats.rejected, stats.min_step, stats.max_step,
                   stats.tolerance};
  return trace;
}

Vec normal_exp(const SubmanifoldPatch& patch, const Vec& u, const Vec& v,
               const NumericParams& params) {
  const Vec p = patch.point_at(u);
  // Require v in the span of the normal frame.
  const std::vector<Vec> frame = patch.normal_frame(u);
  Vec residual = v;
  for (const Vec& n : frame) residual -= patch.parent->inner(p, v, n) * n;
  if (patch.parent->norm(p, residual) > 1e-7 * std::max(1.0, patch.parent->norm(p, v)))
    throw DomainError("normal_exp: vector does not lie in the normal frame span");
  const GeodesicTrace trace = integrate_geodesic(patch.parent, p, v, 1.0, params);
  return trace.position.back();
}

Mat normal_space_basis(const RiemannianSpace& space, const Vec& point, const Vec& unit_dir) {
  const int e = space.embedding_dimension();
  const int m = space.dimension() - 1;
  const Mat basis = space.tangent_basis(point);
  Mat out(e, m);
  std::vector<Vec> accepted;
  accepted.push_back(unit_dir / space.norm(point, unit_dir));
  int filled = 0;
  for (int j = 0; j < basis.cols() && filled < m; ++j) {
    Vec cand = basis.col(j);
    for (const Vec& a : accepted) cand -= space.inner(point, cand, a) * a;
    const double norm = space.norm(point, cand);
    if (norm > 1e-8) {
      cand /= norm;
      accepted.push_back(cand);
      out.col(filled++) = cand;
    }
  }
  if (filled != m) throw DomainError("normal_space_basis: failed to complete a basis");
  return out;
}

}  // namespace ff
