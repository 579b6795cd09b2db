#pragma once

#include "focalforge/errors.hpp"
#include "focalforge/types.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace ff::detail {

struct StepStats {
  long accepted = 0;
  long rejected = 0;
  double min_step = 0.0;
  double max_step = 0.0;
  double tolerance = 0.0;
};

/// Dormand-Prince 5(4) embedded pair with PI-free step control. `rhs`
/// writes dy into its third argument. `on_node(t, y)` fires at t = 0, at
/// every output-grid node and at the horizon; when `nodes` is 0 only the
/// endpoints fire. `post_step` may re-project the state onto a constraint
/// manifold after every accepted step.
inline StepStats rk45_integrate(const std::function<void(double, const Vec&, Vec&)>& rhs,
                                Vec& y, double horizon, double tol, long nodes,
                                const std::function<void(Vec&)>& post_step,
                                const std::function<void(double, const Vec&)>& on_node) {
  StepStats stats;
  stats.tolerance = tol;
  stats.min_step = horizon;

  static const double a21 = 1.0 / 5;
  static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                      a54 = -212.0 / 729;
  static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                      a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                      b6 = 11.0 / 84;
  static const double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                      e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
  static const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;

  const int n = static_cast<int>(y.size());
  Vec k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n), yerr(n);

  double t = 0.0;
  on_node(0.0, y);
  long next_node = 1;
  const double grid_dt = nodes > 0 ? horizon / static_cast<double>(nodes) : horizon;
  double h = std::min(grid_dt, horizon);

  rhs(t, y, k1);
  while (t < horizon - 1e-15 * horizon) {
    const double target = nodes > 0
                              ? std::min(horizon, grid_dt * static_cast<double>(next_node))
                              : horizon;
    h = std::min(h, target - t);
    if (h < 1e-14 * std::max(1.0, horizon))
      throw IntegrationError("step size underflow in adaptive integration", t);

    ytmp = y + h * (a21 * k1);
    rhs(t + c2 * h, ytmp, k2);
    ytmp = y + h * (a31 * k1 + a32 * k2);
    rhs(t + c3 * h, ytmp, k3);
    ytmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
    rhs(t + c4 * h, ytmp, k4);
    ytmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    rhs(t + c5 * h, ytmp, k5);
    ytmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    rhs(t + h, ytmp, k6);
    ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    rhs(t + h, ynew, k7);
    yerr = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    const double scale = tol * (1.0 + y.cwiseAbs().maxCoeff());
    const double err = yerr.cwiseAbs().maxCoeff() / scale;
    if (!std::isfinite(err)) {
      ++stats.rejected;
      h *= 0.2;
      continue;
    }
    if (err <= 1.0) {
      t += h;
      y = ynew;
      post_step(y);
      rhs(t, y, k1);  // freshen after projection
      ++stats.accepted;
      stats.min_step = std::min(stats.min_step, h);
      stats.max_step = std::max(stats.max_step, h);
      if (nodes > 0 && t >= grid_dt * static_cast<double>(next_node) - 1e-12 * horizon) {
        on_node(t, y);
        ++next_node;
      } else if (nodes == 0 && t >= horizon - 1e-15 * horizon) {
        on_node(t, y);
      }
    } else {
      ++stats.rejected;
    }
    const double factor =
        err > 0.0 ? std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0) : 5.0;
    h *= factor;
  }
  return stats;
}

}  // namespace ff::detail
