#pragma once

#include "focalforge/errors.hpp"
#include "focalforge/types.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <vector>

namespace ff::detail {

struct RankDrop {
  double time = 0.0;
  int corank = 0;
  double smallest_retained = 0.0;
  double largest_discarded = 0.0;
};

inline Vec matrix_singular_values(const Mat& a) {
  return Eigen::JacobiSVD<Mat>(a).singularValues();
}

/// Corank under the gap rule: values below focal_zero_tol * scale are
/// discarded and must sit a factor sv_gap below the retained ones. Interior
/// dips into the gray zone raise RankGapError; boundary dips come back as
/// corank 0 (the zero may lie just outside the window).
inline RankDrop corank_call(const Vec& sv, double scale, const NumericParams& params,
                            bool boundary) {
  const double tau = params.focal_zero_tol * scale;
  const int d = static_cast<int>(sv.size());
  int mu = 0;
  for (int i = 0; i < d; ++i)
    if (sv[i] <= tau) ++mu;
  RankDrop drop;
  drop.corank = mu;
  drop.largest_discarded = mu > 0 ? sv[d - mu] : 0.0;
  drop.smallest_retained = mu < d ? sv[d - mu - 1] : 0.0;
  if (mu == 0) {
    if (!boundary && sv[d - 1] <= tau * params.sv_gap) {
      std::ostringstream msg;
      msg << "ambiguous corank: smallest singular value " << sv[d - 1]
          << " lies in the gap zone (" << tau << ", " << tau * params.sv_gap << ")";
      throw RankGapError(msg.str(), std::vector<double>(sv.data(), sv.data() + d));
    }
    return drop;
  }
  if (mu < d && drop.smallest_retained < params.sv_gap * drop.largest_discarded) {
    std::ostringstream msg;
    msg << "corank gap not met: retained " << drop.smallest_retained << " / discarded "
        << drop.largest_discarded << " < " << params.sv_gap;
    throw RankGapError(msg.str(), std::vector<double>(sv.data(), sv.data() + d));
  }
  return drop;
}

/// Cubic Hermite interpolation of a matrix series.
inline Mat hermite_series(const std::vector<double>& times, const std::vector<Mat>& val,
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
  return (2 * s3 - 3 * s2 + 1) * val[k] + ((s3 - 2 * s2 + s) * span) * der[k] +
         (-2 * s3 + 3 * s2) * val[k + 1] + ((s3 - s2) * span) * der[k + 1];
}

/// Scan a (possibly rectangular, rows >= cols) matrix series for rank
/// drops in (t_lo, t_hi]: grid scan of the smallest singular value, then
/// bisection on the determinant sign change (square series with odd-order
/// crossings) or golden-section minimization, localized to
/// params.bisect_tol. Also verifies full rank at all grid nodes away from
/// the returned records.
inline std::vector<RankDrop> scan_rank_drops(const std::vector<double>& times,
                                             const std::vector<Mat>& value,
                                             const std::vector<Mat>& derivative, double t_lo,
                                             double t_hi, const NumericParams& params) {
  const int n = static_cast<int>(times.size());
  if (n < 3) throw DomainError("rank scan: dense series required");
  const int d = static_cast<int>(value.front().cols());
  const bool square = value.front().rows() == d;
  if (d == 0) return {};

  std::vector<double> smin(n);
  double scale = 0.0, dscale = 0.0;
  for (int k = 0; k < n; ++k) {
    const Vec sv = matrix_singular_values(value[k]);
    smin[k] = sv[d - 1];
    scale = std::max(scale, sv[0]);
    dscale = std::max(dscale, derivative[k].cwiseAbs().maxCoeff());
  }
  if (scale <= 0.0) throw DomainError("rank scan: series is identically singular");

  auto value_at = [&](double t) { return hermite_series(times, value, derivative, t); };
  auto smin_at = [&](double t) { return matrix_singular_values(value_at(t))[d - 1]; };

  const double grid_dt = times[1] - times[0];
  const double candidate = params.candidate_tol * scale + d * grid_dt * dscale;
  std::vector<RankDrop> records;

  auto refine_and_record = [&](int k) {
    const double lo = times[std::max(0, k - 1)];
    const double hi = times[std::min(n - 1, k + 1)];
    double t_star;
    const double dlo = square ? value_at(lo).determinant() : 0.0;
    const double dhi = square ? value_at(hi).determinant() : 0.0;
    const double refine_target = std::min(params.bisect_tol, 1e-12);
    if (square && dlo * dhi < 0.0) {
      double a = lo, b = hi, fa = dlo;
      while (b - a > refine_target) {
        const double mid = 0.5 * (a + b);
        const double fm = value_at(mid).determinant();
        if (fa * fm <= 0.0) {
          b = mid;
        } else {
          a = mid;
          fa = fm;
        }
      }
      t_star = 0.5 * (a + b);
    } else {
      const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
      double a = lo, b = hi;
      double c = b - gr * (b - a), e = a + gr * (b - a);
      double fc = smin_at(c), fe = smin_at(e);
      while (b - a > refine_target) {
        if (fc < fe) {
          b = e;
          e = c;
          fe = fc;
          c = b - gr * (b - a);
          fc = smin_at(c);
        } else {
          a = c;
          c = e;
          fc = fe;
          e = a + gr * (b - a);
          fe = smin_at(e);
        }
      }
      t_star = 0.5 * (a + b);
    }
    t_star = std::clamp(t_star, times.front(), times.back());
    if (t_star <= t_lo || t_star > t_hi + params.endpoint_tol) return;
    const bool boundary = (t_star >= times.back() - params.bisect_tol) ||
                          (t_star <= times.front() + params.bisect_tol);
    const Vec sv = matrix_singular_values(value_at(t_star));
    RankDrop drop = corank_call(sv, scale, params, boundary);
    if (drop.corank == 0) return;
    if (!records.empty() && std::abs(records.back().time - t_star) < 10.0 * params.bisect_tol)
      return;
    drop.time = std::min(t_star, t_hi);
    records.push_back(drop);
  };

  for (int k = 1; k < n; ++k) {
    const bool local_min =
        (k + 1 < n) ? (smin[k] <= smin[k - 1] && smin[k] <= smin[k + 1]) : (smin[k] <= smin[k - 1]);
    if (local_min && smin[k] < candidate) refine_and_record(k);
  }

  std::sort(records.begin(), records.end(),
            [](const RankDrop& a, const RankDrop& b) { return a.time < b.time; });

  for (int k = 0; k < n; ++k) {
    if (times[k] <= t_lo || times[k] > t_hi) continue;
    bool near_record = false;
    for (const RankDrop& rec : records)
      if (std::abs(times[k] - rec.time) <= 1.5 * grid_dt) near_record = true;
    if (!near_record && smin[k] <= params.focal_zero_tol * scale) {
      std::ostringstream msg;
      msg << "series rank-deficient away from detected records at t = " << times[k];
      throw RankGapError(msg.str(), {smin[k], scale});
    }
  }
  return records;
}

}  // namespace ff::detail
