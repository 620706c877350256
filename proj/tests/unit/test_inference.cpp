#include <cmath>
#include <random>

#include "doctest.h"
#include "pwshape/errors.hpp"
#include "pwshape/inference.hpp"
#include "pwshape/optimize.hpp"

using namespace pwshape;

namespace {

std::vector<LandmarkConfig> simulate(const MatrixXd& X, int n, double sigma2, std::uint64_t seed,
                                     const std::string& group) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, std::sqrt(sigma2));
  std::vector<LandmarkConfig> out;
  for (int i = 0; i < n; ++i) {
    MatrixXd Y = X;
    for (Eigen::Index j = 0; j < Y.size(); ++j) Y.data()[j] += nd(rng);
    out.push_back({Y, group + std::to_string(i), group});
  }
  return out;
}

MatrixXd triangle4() {
  MatrixXd X(4, 2);
  X << 0, 0, 6, 0, 5, 4, 1, 5;
  return X;
}

ModelSpec gaussian(double s2, int trunc) {
  ModelSpec m;
  m.sigma = s2;
  m.truncation = trunc;
  prepare(m, 2);
  return m;
}

}  // namespace

TEST_CASE("Nelder-Mead") {
  const Eigen::Vector3d c(1, 2, 3);
  auto quad = [&](const Eigen::VectorXd& x) { return (x - c).squaredNorm(); };
  NelderMeadOptions o;
  o.f_tol = 1e-12;
  o.x_tol = 1e-8;
  const NelderMeadResult r = nelder_mead(quad, Eigen::VectorXd::Zero(3), o);
  CHECK(r.converged);
  CHECK((r.x - c).norm() < 1e-3);
  for (std::size_t i = 1; i < r.trace.size(); ++i) CHECK(r.trace[i] <= r.trace[i - 1]);

  auto rosen = [](const Eigen::VectorXd& x) {
    return 100 * std::pow(x(1) - x(0) * x(0), 2) + std::pow(1 - x(0), 2);
  };
  const NelderMeadResult rr = nelder_mead(rosen, Eigen::Vector2d(-1.2, 1), o);
  CHECK((rr.x - Eigen::Vector2d(1, 1)).norm() < 1e-2);

  const Eigen::Vector2d x0(0.3, -2);
  const NelderMeadResult flat = nelder_mead([](const Eigen::VectorXd&) { return 4.0; }, x0);
  CHECK(flat.x == x0);
  CHECK(flat.f == 4.0);
  CHECK(flat.converged);
}

TEST_CASE("BIC* and evidence grades") {
  CHECK(modified_bic(0.0, 23, 0) == 0.0);
  CHECK(modified_bic(0.0, 23, 10) == doctest::Approx(10 * (std::log(25.0) - std::log(24.0))));
  CHECK(modified_bic(0.0, 23, 10) == doctest::Approx(0.40822).epsilon(1e-4));
  CHECK(modified_bic(100.0, 23, 10) == doctest::Approx(-200 + 0.408219945).epsilon(1e-9));
  CHECK(evidence_grade(1.5) == EvidenceGrade::weak);
  CHECK(evidence_grade(2.0) == EvidenceGrade::weak);
  CHECK(evidence_grade(4.0) == EvidenceGrade::positive);
  CHECK(evidence_grade(7.0) == EvidenceGrade::strong);
  CHECK(evidence_grade(104.0) == EvidenceGrade::very_strong);
  CHECK(to_string(EvidenceGrade::very_strong) == "very strong");
}

TEST_CASE("chi-square tail") {
  CHECK(chi2_sf(0.0, 3) == 1.0);
  CHECK(chi2_sf(2 * std::log(2.0), 2) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(chi2_sf(17.5344, 10) == doctest::Approx(0.0633).epsilon(5e-4 / 0.0633));
  // k = 1: erfc(sqrt(x/2))
  CHECK(chi2_sf(3.7, 1) == doctest::Approx(std::erfc(std::sqrt(3.7 / 2))).epsilon(1e-13));
  CHECK_THROWS_AS(chi2_sf(-1.0, 2), DomainError);
}

TEST_CASE("log-likelihood") {
  const auto cfg = simulate(triangle4(), 3, 0.5, 1, "g");
  const Sample s = make_sample(cfg);
  ModelSpec m = gaussian(0.5, 40);
  m.mu = s[0].Y;
  const DensityFn f = density_for(m);
  CHECK(log_likelihood(Sample{}, m, f) == 0.0);
  CHECK(log_likelihood(Sample{s[1]}, m, f) == doctest::Approx(f(s[1].shape, m, nullptr).log_magnitude()));
  double sum = 0.0;
  for (const auto& sp : s) sum += f(sp.shape, m, nullptr).log_magnitude();
  CHECK(log_likelihood(s, m, f) == doctest::Approx(sum).epsilon(1e-14));
}

TEST_CASE("make_sample names the bad specimen") {
  std::vector<LandmarkConfig> cfg = simulate(triangle4(), 2, 0.5, 2, "g");
  cfg[1].X.col(1) = 2.0 * cfg[1].X.col(0);  // collinear landmarks
  try {
    make_sample(cfg);
    FAIL("expected a data error");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find(cfg[1].id) != std::string::npos);
  }
}

TEST_CASE("fit recovers a known mean shape") {
  const MatrixXd X = triangle4();
  const auto cfg = simulate(X, 40, 1.0, 3, "g");
  ModelSpec m = gaussian(1.0, 100);
  const FitResult f = fit_mle(make_sample(cfg), m, density_for(m));
  CHECK(f.optimizer_converged);
  CHECK(f.at_optimum.series_converged);
  CHECK(f.n == 40);
  CHECK(f.n_params == 6);
  CHECK(procrustes_distance(f.mu_hat, preshape(X)) < 0.05);
  CHECK(f.bic_star == doctest::Approx(modified_bic(f.logL, 40, 6)));
  for (std::size_t i = 1; i < f.trace.size(); ++i) CHECK(f.trace[i].second >= f.trace[i - 1].second);
}

TEST_CASE("likelihood ratio test") {
  const MatrixXd X = triangle4();
  const auto g1 = simulate(X, 12, 0.3, 4, "a");
  const auto g2 = simulate(X, 12, 0.3, 5, "b");
  ModelSpec m = gaussian(0.3, 60);
  const DensityFn f = density_for(m);
  const Sample s1 = make_sample(g1), s2 = make_sample(g2);
  const LrtResult same = lrt_mean_shape(s1, s1, m, f);
  CHECK(same.statistic == doctest::Approx(0.0).scale(1.0).epsilon(1e-3));
  CHECK(same.p_value > 0.99);
  CHECK(same.df == 6);
  const LrtResult ab = lrt_mean_shape(s1, s2, m, f), ba = lrt_mean_shape(s2, s1, m, f);
  CHECK(ab.statistic == ba.statistic);
  CHECK(ab.p_value == ba.p_value);
  CHECK(ab.statistic >= 0.0);

  MatrixXd Y = X;
  Y(2, 0) += 3.0;
  const LrtResult diff = lrt_mean_shape(s1, make_sample(simulate(Y, 12, 0.3, 6, "c")), m, f);
  CHECK(diff.p_value < 1e-3);
}
