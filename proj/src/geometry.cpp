#include "pwshape/geometry.hpp"

#include <cmath>
#include <numbers>

namespace pwshape {

int shape_rank(int N, int K) { return std::min(N - 1, K); }

int shape_angle_count(int N, int K) {
  const int n = shape_rank(N, K);
  return (N - 1) * K - n * K + n * (n + 1) / 2 - 1;
}

MatrixXd inv_sqrt_pd(const MatrixXd& theta) {
  if (theta.rows() != theta.cols()) throw DimensionError("inv_sqrt_pd: matrix not square");
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (theta + theta.transpose()));
  if (es.info() != Eigen::Success || !(es.eigenvalues().minCoeff() > 0))
    throw NotPositiveDefiniteError("inv_sqrt_pd: matrix is not positive definite");
  return es.eigenvectors() * es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
}

MatrixXd preshape(const MatrixXd& X, const MatrixXd& theta) {
  const MatrixXd LX = helmert_submatrix(static_cast<int>(X.rows())) * X;
  if (theta.size() == 0) return LX;
  if (theta.rows() != X.cols() || theta.cols() != X.cols())
    throw DimensionError("preshape: Theta must be K x K");
  return LX * inv_sqrt_pd(theta);
}

MatrixXd preshape(const LandmarkConfig& cfg, const MatrixXd& theta) { return preshape(cfg.X, theta); }

VectorXd vecw(const MatrixXd& V, int n) {
  const int p = static_cast<int>(V.rows());
  VectorXd w(n * (n + 1) / 2 + n * (p - n));
  int k = 0;
  for (int c = 0; c < n; ++c)
    for (int i = 0; i <= c; ++i) w(k++) = V(i, c);
  for (int c = n; c < p; ++c)
    for (int i = 0; i < n; ++i) w(k++) = V(i, c);
  return w;
}

MatrixXd from_vecw(const VectorXd& w, int rows, int n) {
  if (w.size() != n * (n + 1) / 2 + n * (rows - n)) throw DimensionError("from_vecw: wrong element count");
  MatrixXd V = MatrixXd::Zero(rows, rows);
  int k = 0;
  for (int c = 0; c < n; ++c)
    for (int i = 0; i <= c; ++i) V(i, c) = V(c, i) = w(k++);
  for (int c = n; c < rows; ++c)
    for (int i = 0; i < n; ++i) V(i, c) = V(c, i) = w(k++);
  if (rows > n) {
    const MatrixXd V11 = V.topLeftCorner(n, n);
    const MatrixXd V12 = V.topRightCorner(n, rows - n);
    Eigen::FullPivLU<MatrixXd> lu(V11);
    if (!lu.isInvertible()) throw SingularBlockError("from_vecw: V11 is singular");
    V.bottomRightCorner(rows - n, rows - n) = V12.transpose() * lu.solve(V12);
  }
  return V;
}

double log_chart_jacobian(const VectorXd& u) {
  const int m = static_cast<int>(u.size());
  double lj = 0.0;
  for (int i = 0; i < m - 1; ++i) lj += (m - 1 - i) * std::log(std::sin(u(i)));
  return lj;
}

ChartPoint angles_to_unit_vector(const VectorXd& u) {
  const int m = static_cast<int>(u.size());
  if (m < 1) throw DimensionError("angles_to_unit_vector: need at least one angle");
  for (int i = 0; i < m; ++i) {
    const double hi = i == m - 1 ? 2 * std::numbers::pi : std::numbers::pi;
    if (!(u(i) >= 0.0 && u(i) <= hi)) throw DomainError("angles_to_unit_vector: angle out of range");
  }
  ChartPoint p;
  p.w.resize(m + 1);
  double s = 1.0;
  for (int i = 0; i < m; ++i) {
    p.w(i) = s * std::cos(u(i));
    s *= std::sin(u(i));
  }
  p.w(m) = s;
  p.log_jacobian = log_chart_jacobian(u);
  return p;
}

VectorXd unit_vector_to_angles(const VectorXd& w) {
  const int m = static_cast<int>(w.size()) - 1;
  if (m < 1) throw DimensionError("unit_vector_to_angles: need at least two coordinates");
  VectorXd u(m);
  for (int i = 0; i < m - 1; ++i) u(i) = std::atan2(w.tail(m - i).norm(), w(i));
  double last = std::atan2(w(m), w(m - 1));
  if (last < 0) last += 2 * std::numbers::pi;
  u(m - 1) = last;
  return u;
}

double w_star_logdet(const PseudoWishartShape& s, VStarMode mode) {
  if (mode == VStarMode::cholesky) {
    Eigen::LLT<MatrixXd> llt(s.V.topLeftCorner(s.n, s.n));
    if (llt.info() != Eigen::Success) throw SingularBlockError("w_star_logdet: V11 is not positive definite");
    const double logdet = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
    if (!(logdet > std::log(1e-300))) throw SingularBlockError("w_star_logdet: V11 is singular");
    return logdet - s.n * std::log(s.r);
  }
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(s.V, Eigen::EigenvaluesOnly);
  const VectorXd d = es.eigenvalues().reverse().head(s.n);
  if (!(d.minCoeff() > 0)) throw RankDeficientError("w_star_logdet: fewer than n positive eigenvalues");
  return (d.array() / s.r).log().sum();
}

namespace {

void finish_shape(PseudoWishartShape& s, VStarMode mode) {
  const VectorXd w = vecw(s.V, s.n);
  s.chart = w / w.norm();
  s.u = unit_vector_to_angles(s.chart);
  s.log_jacobian = log_chart_jacobian(s.u);
  s.vstar = mode;
  s.log_wstar = w_star_logdet(s, mode);
}

}  // namespace

PseudoWishartShape pw_coordinates(const MatrixXd& Y, VStarMode mode) {
  PseudoWishartShape s;
  s.N = static_cast<int>(Y.rows()) + 1;
  s.K = static_cast<int>(Y.cols());
  if (s.N < 3 || s.K < 2) throw DimensionError("pw_coordinates: need N >= 3 and K >= 2");
  s.n = shape_rank(s.N, s.K);
  s.m = shape_angle_count(s.N, s.K);
  Eigen::JacobiSVD<MatrixXd> svd(Y);
  const VectorXd sv = svd.singularValues();
  if (!(sv(0) > 0) || sv(s.n - 1) <= 1e-10 * sv(0)) throw RankDeficientError("pw_coordinates: preshape has rank below n");
  s.V = Y * Y.transpose();
  s.r = s.V.norm();
  s.W = s.V / s.r;
  finish_shape(s, mode);
  return s;
}

PseudoWishartShape shape_from_chart(int N, int K, const VectorXd& u, VStarMode mode) {
  PseudoWishartShape s;
  s.N = N;
  s.K = K;
  s.n = shape_rank(N, K);
  s.m = shape_angle_count(N, K);
  if (u.size() != s.m) throw DimensionError("shape_from_chart: wrong number of angles");
  const ChartPoint p = angles_to_unit_vector(u);
  s.V = from_vecw(p.w, N - 1, s.n);
  s.r = 1.0;
  s.W = s.V;
  s.chart = p.w;
  s.u = u;
  s.log_jacobian = p.log_jacobian;
  s.vstar = mode;
  s.log_wstar = w_star_logdet(s, mode);
  return s;
}

double procrustes_distance(const MatrixXd& Y1, const MatrixXd& Y2, bool allow_reflection) {
  if (Y1.rows() != Y2.rows() || Y1.cols() != Y2.cols()) throw DimensionError("procrustes_distance: shapes differ");
  const double n1 = Y1.norm(), n2 = Y2.norm();
  if (!(n1 > 0.0 && n2 > 0.0)) throw DomainError("procrustes_distance: degenerate configuration");
  const MatrixXd C = (Y1 / n1).transpose() * (Y2 / n2);
  Eigen::JacobiSVD<MatrixXd> svd(C, Eigen::ComputeFullU | Eigen::ComputeFullV);
  VectorXd sv = svd.singularValues();
  if (!allow_reflection && (svd.matrixU() * svd.matrixV().transpose()).determinant() < 0) sv(sv.size() - 1) *= -1.0;
  const double rho = std::min(1.0, sv.sum());
  return std::sqrt(std::max(0.0, 1.0 - rho * rho));
}

}  // namespace pwshape
