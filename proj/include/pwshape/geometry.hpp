#pragma once

#include <Eigen/Dense>
#include <string>

#include "pwshape/errors.hpp"

namespace pwshape {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// One specimen: N landmarks in K dimensions.
struct LandmarkConfig {
  MatrixXd X;
  std::string id;
  std::string group;
};

/// Which block of V supplies |V*|.
enum class VStarMode { cholesky, spectral };

/// Shape coordinates of one specimen.
///
/// W = V / r with r = ||V||_F. The polar chart works on the m+1 independent
/// elements of V (upper triangle of V11 by columns, then V12 by columns)
/// normalized to unit length; `chart` holds that unit vector.
struct PseudoWishartShape {
  int N = 0, K = 0, n = 0, m = 0;
  MatrixXd V;
  double r = 0.0;
  MatrixXd W;
  VectorXd u;
  VectorXd chart;
  double log_jacobian = 0.0;
  double log_wstar = 0.0;
  VStarMode vstar = VStarMode::cholesky;
};

/// n = min(N-1, K).
int shape_rank(int N, int K);
/// m = (N-1)K - nK + n(n+1)/2 - 1.
int shape_angle_count(int N, int K);

/// Rows 1..N-1 of the Helmert matrix: row i is (1,..,1,-i,0,..,0)/sqrt(i(i+1)).
template <typename Scalar = double>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> helmert_submatrix(int N) {
  if (N < 2) throw DimensionError("helmert_submatrix: N must be at least 2");
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> L =
      Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(N - 1, N);
  for (int i = 1; i < N; ++i) {
    using std::sqrt;
    const Scalar s = Scalar(1) / sqrt(Scalar(i) * Scalar(i + 1));
    L.row(i - 1).head(i).setConstant(s);
    L(i - 1, i) = -Scalar(i) * s;
  }
  return L;
}

/// Symmetric positive definite square root through the eigendecomposition.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> sqrt_pd(const Eigen::MatrixBase<Derived>& theta) {
  using Mat = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  if (theta.rows() != theta.cols()) throw DimensionError("sqrt_pd: matrix not square");
  Mat sym = 0.5 * (theta + theta.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(sym);
  if (es.info() != Eigen::Success) throw NotPositiveDefiniteError("sqrt_pd: eigendecomposition failed");
  if (!(es.eigenvalues().minCoeff() > 0)) throw NotPositiveDefiniteError("sqrt_pd: matrix is not positive definite");
  return es.eigenvectors() * es.eigenvalues().cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
}

/// Inverse square root, same conventions as sqrt_pd.
MatrixXd inv_sqrt_pd(const MatrixXd& theta);

/// Y = L X Theta^{-1/2}. An empty theta means the identity.
MatrixXd preshape(const MatrixXd& X, const MatrixXd& theta = MatrixXd());
MatrixXd preshape(const LandmarkConfig& cfg, const MatrixXd& theta = MatrixXd());

/// Independent elements of V in chart order.
VectorXd vecw(const MatrixXd& V, int n);
/// Rebuilds a rank-n matrix from its independent elements, V22 = V21 V11^{-1} V12.
MatrixXd from_vecw(const VectorXd& w, int rows, int n);

struct ChartPoint {
  VectorXd w;
  double log_jacobian = 0.0;
};

/// Standard spherical chart: w1 = cos t1, wj = cos tj prod_{i<j} sin ti,
/// w_{m+1} = prod sin ti; log J = sum_i (m-i) log sin ti.
ChartPoint angles_to_unit_vector(const VectorXd& u);
/// Inverse chart; angles in [0, pi] except the last in [0, 2pi).
VectorXd unit_vector_to_angles(const VectorXd& w);
double log_chart_jacobian(const VectorXd& u);

/// Coordinates of a preshape.
PseudoWishartShape pw_coordinates(const MatrixXd& Y, VStarMode mode = VStarMode::cholesky);

/// log|W*| under the given mode.
double w_star_logdet(const PseudoWishartShape& shape, VStarMode mode);

/// Shape at chart angles u with the independent elements of W of unit norm
/// (r = 1, V = W). Used for integrating over the chart.
PseudoWishartShape shape_from_chart(int N, int K, const VectorXd& u, VStarMode mode = VStarMode::cholesky);

/// Full Procrustes distance between two preshapes (centred already), after
/// scaling to unit size; reflections are allowed when `allow_reflection`.
double procrustes_distance(const MatrixXd& Y1, const MatrixXd& Y2, bool allow_reflection = true);

}  // namespace pwshape
