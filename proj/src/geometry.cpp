#include "focalforge/geometry.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <sstream>

namespace ff {

RiemannianSpace RiemannianSpace::euclidean(int n) {
  if (n <= 0) throw DomainError("euclidean: dimension must be positive");
  RiemannianSpace s;
  s.kind_ = Kind::Euclidean;
  s.dim_ = n;
  s.emb_dim_ = n;
  return s;
}

RiemannianSpace RiemannianSpace::round_sphere(int n, double radius) {
  if (n <= 0) throw DomainError("round_sphere: dimension must be positive");
  if (radius <= 0.0) throw DomainError("round_sphere: radius must be positive");
  RiemannianSpace s;
  s.kind_ = Kind::RoundSphere;
  s.dim_ = n;
  s.emb_dim_ = n + 1;
  s.radius_ = radius;
  return s;
}

RiemannianSpace RiemannianSpace::chart_metric(int n, MetricMap g, double christoffel_step,
                                              double curvature_step) {
  if (n <= 0) throw DomainError("chart_metric: dimension must be positive");
  if (!g) throw DomainError("chart_metric: metric map required");
  RiemannianSpace s;
  s.kind_ = Kind::ChartMetric;
  s.dim_ = n;
  s.emb_dim_ = n;
  s.metric_ = std::move(g);
  s.christoffel_step_ = christoffel_step;
  s.curvature_step_ = curvature_step;
  return s;
}

RiemannianSpace RiemannianSpace::product(RiemannianSpace a, RiemannianSpace b) {
  RiemannianSpace s;
  s.kind_ = Kind::Product;
  s.dim_ = a.dimension() + b.dimension();
  s.emb_dim_ = a.embedding_dimension() + b.embedding_dimension();
  s.left_ = std::make_shared<const RiemannianSpace>(std::move(a));
  s.right_ = std::make_shared<const RiemannianSpace>(std::move(b));
  return s;
}

const RiemannianSpace& RiemannianSpace::factor(int i) const {
  if (kind_ != Kind::Product) throw DomainError("factor: not a product space");
  return i == 0 ? *left_ : *right_;
}

bool RiemannianSpace::flat() const {
  switch (kind_) {
    case Kind::Euclidean:
      return true;
    case Kind::Product:
      return left_->flat() && right_->flat();
    default:
      return false;
  }
}

void RiemannianSpace::check_point(const Vec& point, double tol) const {
  if (point.size() != emb_dim_) {
    std::ostringstream msg;
    msg << "point has " << point.size() << " coordinates, expected " << emb_dim_;
    throw DomainError(msg.str());
  }
  switch (kind_) {
    case Kind::RoundSphere: {
      const double residual = std::abs(point.norm() - radius_);
      if (residual > tol) {
        std::ostringstream msg;
        msg << "point off sphere constraint | |p| - r | = " << residual << " (tol " << tol << ")";
        throw DomainError(msg.str());
      }
      break;
    }
    case Kind::Product: {
      left_->check_point(point.head(left_->embedding_dimension()), tol);
      right_->check_point(point.tail(right_->embedding_dimension()), tol);
      break;
    }
    default:
      break;
  }
}

void RiemannianSpace::check_tangent(const Vec& point, const Vec& u, double tol) const {
  if (u.size() != emb_dim_) throw DomainError("tangent vector has wrong coordinate length");
  switch (kind_) {
    case Kind::RoundSphere: {
      const double residual = std::abs(point.dot(u)) / std::max(1.0, u.norm() * radius_);
      if (residual > tol) {
        std::ostringstream msg;
        msg << "vector not tangent to sphere, <p,u>/(r|u|) = " << residual;
        throw DomainError(msg.str());
      }
      break;
    }
    case Kind::Product: {
      left_->check_tangent(point.head(left_->embedding_dimension()),
                           u.head(left_->embedding_dimension()), tol);
      right_->check_tangent(point.tail(right_->embedding_dimension()),
                            u.tail(right_->embedding_dimension()), tol);
      break;
    }
    default:
      break;
  }
}

Mat RiemannianSpace::metric_at(const Vec& point) const {
  check_point(point);
  switch (kind_) {
    case Kind::Euclidean:
    case Kind::RoundSphere:
      return Mat::Identity(dim_, dim_);
    case Kind::ChartMetric: {
      Mat g = metric_(point);
      if (g.rows() != dim_ || g.cols() != dim_) throw DomainError("metric map returned wrong size");
      return 0.5 * (g + g.transpose());
    }
    case Kind::Product: {
      Mat g = Mat::Zero(dim_, dim_);
      const int dl = left_->dimension();
      g.topLeftCorner(dl, dl) = left_->metric_at(point.head(left_->embedding_dimension()));
      g.bottomRightCorner(dim_ - dl, dim_ - dl) =
          right_->metric_at(point.tail(right_->embedding_dimension()));
      return g;
    }
  }
  return Mat();
}

Mat RiemannianSpace::tangent_basis(const Vec& point) const {
  check_point(point);
  switch (kind_) {
    case Kind::Euclidean:
      return Mat::Identity(dim_, dim_);
    case Kind::RoundSphere: {
      // Complete the unit radial direction to an ambient orthonormal basis
      // (Householder QR of [p | I]); drop the radial column.
      Vec n = point / point.norm();
      Mat a(emb_dim_, emb_dim_);
      a.col(0) = n;
      a.rightCols(emb_dim_ - 1) = Mat::Identity(emb_dim_, emb_dim_ - 1);
      Eigen::HouseholderQR<Mat> qr(a);
      Mat q = qr.householderQ();
      if (q.col(0).dot(n) < 0.0) q = -q;
      return q.rightCols(dim_);
    }
    case Kind::ChartMetric: {
      // g-orthonormal columns: g = L L^T, basis = L^{-T}.
      Eigen::LLT<Mat> llt(metric_at(point));
      if (llt.info() != Eigen::Success) throw DomainError("chart metric not positive definite");
      Mat l = llt.matrixL();
      return l.transpose().triangularView<Eigen::Upper>().solve(Mat::Identity(dim_, dim_));
    }
    case Kind::Product: {
      Mat b = Mat::Zero(emb_dim_, dim_);
      const int el = left_->embedding_dimension();
      const int dl = left_->dimension();
      b.topLeftCorner(el, dl) = left_->tangent_basis(point.head(el));
      b.bottomRightCorner(emb_dim_ - el, dim_ - dl) =
          right_->tangent_basis(point.tail(emb_dim_ - el));
      return b;
    }
  }
  return Mat();
}

double RiemannianSpace::inner(const Vec& point, const Vec& a, const Vec& b) const {
  switch (kind_) {
    case Kind::Euclidean:
    case Kind::RoundSphere:
      return a.dot(b);
    case Kind::ChartMetric:
      return a.dot(metric_(point) * b);
    case Kind::Product: {
      const int el = left_->embedding_dimension();
      return left_->inner(point.head(el), a.head(el), b.head(el)) +
             right_->inner(point.tail(emb_dim_ - el), a.tail(emb_dim_ - el),
                           b.tail(emb_dim_ - el));
    }
  }
  return 0.0;
}

double RiemannianSpace::norm(const Vec& point, const Vec& a) const {
  return std::sqrt(std::max(0.0, inner(point, a, a)));
}

double RiemannianSpace::constraint_residual(const Vec& point) const {
  switch (kind_) {
    case Kind::RoundSphere:
      return std::abs(point.norm() - radius_);
    case Kind::Product: {
      const int el = left_->embedding_dimension();
      return std::max(left_->constraint_residual(point.head(el)),
                      right_->constraint_residual(point.tail(emb_dim_ - el)));
    }
    default:
      return 0.0;
  }
}

void RiemannianSpace::project(Vec& point, Vec& velocity) const {
  switch (kind_) {
    case Kind::RoundSphere: {
      point *= radius_ / point.norm();
      velocity -= (point.dot(velocity) / (radius_ * radius_)) * point;
      break;
    }
    case Kind::Product: {
      const int el = left_->embedding_dimension();
      Vec p = point.head(el), v = velocity.head(el);
      left_->project(p, v);
      point.head(el) = p;
      velocity.head(el) = v;
      Vec q = point.tail(emb_dim_ - el), w = velocity.tail(emb_dim_ - el);
      right_->project(q, w);
      point.tail(emb_dim_ - el) = q;
      velocity.tail(emb_dim_ - el) = w;
      break;
    }
    default:
      break;
  }
}

std::vector<Mat> RiemannianSpace::christoffel(const Vec& x) const {
  if (kind_ != Kind::ChartMetric) throw DomainError("christoffel: chart-metric kind only");
  const int n = dim_;
  const double h = christoffel_step_;
  // dg[a](i,j) = d g_ij / d x_a by central differences.
  std::vector<Mat> dg(n);
  Vec xp = x, xm = x;
  for (int a = 0; a < n; ++a) {
    xp[a] = x[a] + h;
    xm[a] = x[a] - h;
    dg[a] = (metric_(xp) - metric_(xm)) / (2.0 * h);
    xp[a] = x[a];
    xm[a] = x[a];
  }
  const Mat ginv = metric_(x).inverse();
  std::vector<Mat> gamma(n, Mat::Zero(n, n));
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int l = 0; l < n; ++l) s += ginv(k, l) * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
        gamma[k](i, j) = 0.5 * s;
      }
  return gamma;
}

namespace {

// Chart-metric curvature from second central differences of g. Builds
// Gamma and d Gamma directly from dg and ddg so the differencing error is
// one order, not nested.
Vec chart_curvature(const MetricMap& metric, const Vec& x, const Vec& u, const Vec& w, double h) {
  const int n = x.size();
  const Mat g0 = metric(x);
  const Mat ginv = g0.inverse();

  std::vector<Mat> dg(n);           // dg[a] = d_a g
  std::vector<std::vector<Mat>> ddg(n, std::vector<Mat>(n));  // ddg[a][b] = d_a d_b g
  Vec xs = x;
  for (int a = 0; a < n; ++a) {
    xs[a] = x[a] + h;
    const Mat gp = metric(xs);
    xs[a] = x[a] - h;
    const Mat gm = metric(xs);
    xs[a] = x[a];
    dg[a] = (gp - gm) / (2.0 * h);
    ddg[a][a] = (gp - 2.0 * g0 + gm) / (h * h);
  }
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      xs[a] += h;
      xs[b] += h;
      const Mat gpp = metric(xs);
      xs[b] -= 2.0 * h;
      const Mat gpm = metric(xs);
      xs[a] -= 2.0 * h;
      const Mat gmm = metric(xs);
      xs[b] += 2.0 * h;
      const Mat gmp = metric(xs);
      xs[a] = x[a];
      xs[b] = x[b];
      ddg[a][b] = ddg[b][a] = (gpp - gpm - gmp + gmm) / (4.0 * h * h);
    }

  auto lower_gamma = [&](int i, int j, int l) {
    return 0.5 * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
  };
  // d_a of the lowered symbol Gamma_{ij,l}.
  auto dlower_gamma = [&](int a, int i, int j, int l) {
    return 0.5 * (ddg[a][i](j, l) + ddg[a][j](i, l) - ddg[a][l](i, j));
  };

  std::vector<Mat> gamma(n, Mat::Zero(n, n));
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int l = 0; l < n; ++l) s += ginv(k, l) * lower_gamma(i, j, l);
        gamma[k](i, j) = s;
      }

  // d_a ginv = -ginv (d_a g) ginv
  std::vector<Mat> dginv(n);
  for (int a = 0; a < n; ++a) dginv[a] = -ginv * dg[a] * ginv;

  // dgamma[a][k](i,j) = d_a Gamma^k_{ij}
  std::vector<std::vector<Mat>> dgamma(n, std::vector<Mat>(n, Mat::Zero(n, n)));
  for (int a = 0; a < n; ++a)
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          double s = 0.0;
          for (int l = 0; l < n; ++l)
            s += dginv[a](k, l) * lower_gamma(i, j, l) + ginv(k, l) * dlower_gamma(a, i, j, l);
          dgamma[a][k](i, j) = s;
        }

  // R(u,w)w with R^l_{kij} = d_i Gamma^l_{jk} - d_j Gamma^l_{ik}
  //                          + Gamma^l_{im} Gamma^m_{jk} - Gamma^l_{jm} Gamma^m_{ik}.
  Vec out = Vec::Zero(n);
  for (int l = 0; l < n; ++l) {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          double r = dgamma[i][l](j, k) - dgamma[j][l](i, k);
          for (int m = 0; m < n; ++m)
            r += gamma[l](i, m) * gamma[m](j, k) - gamma[l](j, m) * gamma[m](i, k);
          s += r * u[i] * w[j] * w[k];
        }
    out[l] = s;
  }
  return out;
}

}  // namespace

Vec RiemannianSpace::curvature_operator(const Vec& point, const Vec& u, const Vec& w) const {
  check_point(point);
  check_tangent(point, u);
  check_tangent(point, w);
  return curvature_unchecked(point, u, w);
}

Vec RiemannianSpace::curvature_unchecked(const Vec& point, const Vec& u, const Vec& w) const {
  switch (kind_) {
    case Kind::Euclidean:
      return Vec::Zero(emb_dim_);
    case Kind::RoundSphere: {
      const double kappa = 1.0 / (radius_ * radius_);
      return kappa * (w.dot(w) * u - u.dot(w) * w);
    }
    case Kind::ChartMetric:
      return chart_curvature(metric_, point, u, w, curvature_step_);
    case Kind::Product: {
      Vec out(emb_dim_);
      const int el = left_->embedding_dimension();
      out.head(el) = left_->curvature_unchecked(point.head(el), u.head(el), w.head(el));
      out.tail(emb_dim_ - el) = right_->curvature_unchecked(
          point.tail(emb_dim_ - el), u.tail(emb_dim_ - el), w.tail(emb_dim_ - el));
      return out;
    }
  }
  return Vec();
}

Vec RiemannianSpace::geodesic_acceleration(const Vec& point, const Vec& velocity) const {
  switch (kind_) {
    case Kind::Euclidean:
      return Vec::Zero(emb_dim_);
    case Kind::RoundSphere:
      return -(velocity.squaredNorm() / (radius_ * radius_)) * point;
    case Kind::ChartMetric: {
      const std::vector<Mat> gamma = christoffel(point);
      Vec a(dim_);
      for (int k = 0; k < dim_; ++k) a[k] = -velocity.dot(gamma[k] * velocity);
      return a;
    }
    case Kind::Product: {
      Vec a(emb_dim_);
      const int el = left_->embedding_dimension();
      a.head(el) = left_->geodesic_acceleration(point.head(el), velocity.head(el));
      a.tail(emb_dim_ - el) =
          right_->geodesic_acceleration(point.tail(emb_dim_ - el), velocity.tail(emb_dim_ - el));
      return a;
    }
  }
  return Vec();
}

Vec RiemannianSpace::parallel_transport_rhs(const Vec& point, const Vec& velocity,
                                            const Vec& e) const {
  switch (kind_) {
    case Kind::Euclidean:
      return Vec::Zero(emb_dim_);
    case Kind::RoundSphere:
      return -(e.dot(velocity) / (radius_ * radius_)) * point;
    case Kind::ChartMetric: {
      const std::vector<Mat> gamma = christoffel(point);
      Vec d(dim_);
      for (int k = 0; k < dim_; ++k) d[k] = -velocity.dot(gamma[k] * e);
      return d;
    }
    case Kind::Product: {
      Vec d(emb_dim_);
      const int el = left_->embedding_dimension();
      d.head(el) = left_->parallel_transport_rhs(point.head(el), velocity.head(el), e.head(el));
      d.tail(emb_dim_ - el) = right_->parallel_transport_rhs(
          point.tail(emb_dim_ - el), velocity.tail(emb_dim_ - el), e.tail(emb_dim_ - el));
      return d;
    }
  }
  return Vec();
}

std::string RiemannianSpace::describe() const {
  std::ostringstream out;
  switch (kind_) {
    case Kind::Euclidean:
      out << "euclidean(" << dim_ << ")";
      break;
    case Kind::RoundSphere:
      out << "round-sphere(" << dim_ << ", r=" << radius_ << ")";
      break;
    case Kind::ChartMetric:
      out << "chart-metric(" << dim_ << ")";
      break;
    case Kind::Product:
      out << "product(" << left_->describe() << ", " << right_->describe() << ")";
      break;
  }
  return out.str();
}

}  // namespace ff
