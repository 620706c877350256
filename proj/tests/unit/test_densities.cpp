#include <cmath>
#include <random>

#include "doctest.h"
#include "pwshape/densities.hpp"
#include "pwshape/errors.hpp"
#include "pwshape/inference.hpp"
#include "pwshape/oracles.hpp"

using namespace pwshape;

namespace {

MatrixXd noisy(const MatrixXd& mu, double sd, std::mt19937_64& rng) {
  std::normal_distribution<double> nd(0.0, sd);
  MatrixXd Y = mu;
  for (Eigen::Index i = 0; i < Y.size(); ++i) Y.data()[i] += nd(rng);
  return Y;
}

// Helmertized mean taken from a fitted small-group Gaussian model (mouse scale)
MatrixXd mouse_mu() {
  MatrixXd mu(5, 2);
  mu << -3.41, -77.44, 25.88, -8.71, 43.94, -0.37, 8.79, 8.76, -53.43, 5.37;
  return mu;
}

MatrixXd small_mu() {
  MatrixXd mu(5, 2);
  mu << 3.0, -1.0, 1.5, 2.0, -2.0, 0.5, 0.7, -1.2, -0.4, 1.1;
  return mu;
}

double logf(const SignedLogValue& v) {
  REQUIRE(v.sign() == 1);
  return v.log_magnitude();
}

ModelSpec model(Generator g, const MatrixXd& mu, double s2, int trunc, int K = 2) {
  ModelSpec m;
  m.generator = std::move(g);
  m.mu = mu;
  m.sigma = s2;
  m.truncation = trunc;
  prepare(m, K);
  return m;
}

}  // namespace

TEST_CASE("radial exponent conventions") {
  std::mt19937_64 rng(1);
  const PseudoWishartShape s = pw_coordinates(noisy(small_mu(), 1.0, rng));  // N = 6, K = 2: n = 2, m = 8
  CHECK(radial_exponent(s, RadialConvention::printed) == doctest::Approx(12.0));
  CHECK(radial_exponent(s, RadialConvention::derived) == doctest::Approx(4.0));
}

TEST_CASE("central case collapses to the generator-free density") {
  std::mt19937_64 rng(2);
  const PseudoWishartShape s = pw_coordinates(noisy(small_mu(), 1.0, rng));
  const double ref = central_invariant_logdensity(s, 2.0);
  for (Generator g : {Generator{GaussianFamily{}}, Generator{KotzFamily{2.0, 0.5}}, Generator{KotzFamily{3.0, 1.3}},
                      Generator{KotzFamily{2.5, 0.8}}}) {
    ModelSpec m = model(g, MatrixXd(), 2.0, 40);
    CHECK(logf(shape_logdensity(s, m)) == doctest::Approx(ref).epsilon(1e-9));
  }
  ModelSpec g = model(GaussianFamily{}, MatrixXd(), 2.0, 40);
  CHECK(logf(kotz_t1_shape_logdensity(s, g)) == doctest::Approx(ref).epsilon(1e-12));

  // shape carries no scale: the isotropic central density ignores sigma^2
  const PseudoWishartShape u = pw_coordinates(noisy(small_mu(), 1.0, rng));
  CHECK(central_invariant_logdensity(u, 1.0) == doctest::Approx(central_invariant_logdensity(u, 4.0)).epsilon(1e-13));
}

TEST_CASE("closed forms agree with the theorem path") {
  std::mt19937_64 rng(3);
  const MatrixXd mu = small_mu();
  for (int s = 0; s < 3; ++s) {
    const PseudoWishartShape sh = pw_coordinates(noisy(mu, 1.2, rng));
    for (auto conv : {RadialConvention::printed, RadialConvention::derived}) {
      ModelSpec g = model(GaussianFamily{}, mu, 1.5, 60);
      g.convention = conv;
      const double t1 = logf(kotz_t1_shape_logdensity(sh, g));
      CHECK(logf(gaussian_isotropic_shape_logdensity(sh, g)) == doctest::Approx(t1).epsilon(1e-12));
      CHECK(logf(isotropic_shape_logdensity(sh, g)) == doctest::Approx(t1).epsilon(1e-10));
      CHECK(logf(kotz_general_shape_logdensity(sh, g)) == doctest::Approx(t1).epsilon(1e-10));
      ModelSpec q = g;
      q.radial = RadialMethod::quadrature;
      CHECK(logf(shape_logdensity(sh, q)) == doctest::Approx(t1).epsilon(1e-9));

      for (double T : {2.0, 3.0}) {
        ModelSpec k = model(KotzFamily{T, 0.5}, mu, 1.5, 60);
        k.convention = conv;
        const double general = logf(kotz_general_shape_logdensity(sh, k));
        const double display = logf(T == 2.0 ? kotz_t2_shape_logdensity(sh, k) : kotz_t3_shape_logdensity(sh, k));
        CHECK(display == doctest::Approx(general).epsilon(1e-9));
        ModelSpec kq = k;
        kq.radial = RadialMethod::quadrature;
        CHECK(logf(shape_logdensity(sh, kq)) == doctest::Approx(general).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("isotropic corollary equals the general Sigma path") {
  std::mt19937_64 rng(4);
  const MatrixXd mu = small_mu();
  const PseudoWishartShape sh = pw_coordinates(noisy(mu, 1.0, rng));
  for (Generator g : {Generator{GaussianFamily{}}, Generator{KotzFamily{3.0, 0.5}}}) {
    ModelSpec iso = model(g, mu, 2.5, 50);
    ModelSpec full = iso;
    full.sigma = MatrixXd(2.5 * MatrixXd::Identity(5, 5));
    CHECK(logf(isotropic_shape_logdensity(sh, iso)) == doctest::Approx(logf(shape_logdensity(sh, full))).epsilon(1e-12));
  }
}

TEST_CASE("general Sigma and Theta") {
  std::mt19937_64 rng(5);
  const MatrixXd mu = small_mu();
  const PseudoWishartShape sh = pw_coordinates(noisy(mu, 1.0, rng));
  MatrixXd S = MatrixXd::Identity(5, 5) * 1.5;
  S(0, 1) = S(1, 0) = 0.4;
  ModelSpec g = model(GaussianFamily{}, mu, 1.0, 60);
  g.sigma = S;
  ModelSpec q = g;
  q.radial = RadialMethod::quadrature;
  CHECK(logf(kotz_t1_shape_logdensity(sh, g)) == doctest::Approx(logf(shape_logdensity(sh, q))).epsilon(1e-9));
  CHECK_THROWS_AS(kotz_t2_shape_logdensity(sh, g), DomainError);
  ModelSpec bad = g;
  bad.sigma = MatrixXd(MatrixXd::Identity(4, 4));
  CHECK_THROWS(shape_logdensity(sh, bad));
}

TEST_CASE("radial weights against quadrature") {
  // 3 x 3 x 3 grid over (A, B, t); T = 2 central weight is Gamma(a+1) - 2t Gamma(a) in scaled form
  for (double T : {1.0, 2.0, 3.0})
    for (double A : {0.02, 0.5, 3.0})
      for (double B : {0.0, 4.0, 60.0})
        for (int t : {0, 3, 25}) {
          const KotzGenerator g{T, 0.5, 10};
          const double e = 8.5 + t;
          const SignedLogValue c = radial_integral_kotz(g, e, t, A, B);
          const SignedLogValue q = radial_integral_quadrature(KotzFamily{T, 0.5}, 10, e, t, A, B);
          CHECK(c.sign() == q.sign());
          CHECK(c.log_magnitude() == doctest::Approx(q.log_magnitude()).epsilon(1e-8));
        }
}

TEST_CASE("T = 2 weight sign and extended precision sum") {
  // int r^e h^{(2t)}(rA + B) dr for h = c y e^{-y/2}:
  // c 2^{-2t} e^{-B/2} Gamma(e+1) (A/2)^{-(e+1)} [2(e+1) + B - 4t]
  const KotzGenerator g{2.0, 0.5, 10};
  for (int t : {1, 4, 9})
    for (double B : {0.0, 1.0, 7.0}) {
      const double A = 0.8, e = 3.5 + t;
      const long double c = std::exp(static_cast<long double>(kotz_log_constant(g)));
      const long double direct = c * std::pow(0.5L, 2 * t) * std::exp(-0.5L * B) * std::tgamma(e + 1.0L) *
                                 std::pow(0.5L * A, -(e + 1.0L)) * (2.0L * (e + 1) + B - 4.0L * t);
      const SignedLogValue w = radial_integral_kotz(g, e, t, A, B);
      CHECK(w.sign() == (direct > 0 ? 1 : -1));
      CHECK(w.value() == doctest::Approx(static_cast<double>(direct)).epsilon(1e-10));
    }
}

TEST_CASE("noncentral density integrates to one over the chart") {
  // N = 3, K = 2; Monte Carlo over the 2-angle chart
  MatrixXd mu(2, 2);
  mu << 2.0, 0.6, -0.8, 1.6;
  for (double T : {1.0, 3.0}) {
    const ModelSpec m = model(KotzFamily{T, 0.5}, mu, 1.0, 60);
    const DensityFn f = density_for(m);
    McOptions o;
    o.samples = 60000;
    o.seed = 99;
    const OracleReport r =
        mc_normalization([&](const PseudoWishartShape& s) { return f(s, m, nullptr).log_magnitude(); }, 3, 2, o);
    CHECK(std::abs(r.computed - 1.0) < 4.0 * r.std_error + 1e-3);
  }
}

TEST_CASE("mouse-scale truncation behaviour") {
  std::mt19937_64 rng(6);
  const MatrixXd mu = mouse_mu();
  const PseudoWishartShape sh = pw_coordinates(noisy(mu, std::sqrt(50.0), rng));
  DensityDiagnostics d120, d160, d260;
  const double v120 = logf(kotz_t1_shape_logdensity(sh, model(GaussianFamily{}, mu, 50.0, 120), &d120));
  const double v160 = logf(kotz_t1_shape_logdensity(sh, model(GaussianFamily{}, mu, 50.0, 160), &d160));
  const double v260 = logf(kotz_t1_shape_logdensity(sh, model(GaussianFamily{}, mu, 50.0, 260), &d260));
  // at this mean the series has not settled by 120; the flags must say so
  CHECK_FALSE(d120.series.converged);
  CHECK(std::abs(v160 - v120) > 1e-6);
  CHECK(d260.series.converged);
  CHECK(std::abs(v260 - v160) < 1e-2);
  // a smaller mean settles well before 120
  const MatrixXd half = 0.5 * mu;
  const PseudoWishartShape sh2 = pw_coordinates(noisy(half, std::sqrt(50.0), rng));
  const double a = logf(kotz_t1_shape_logdensity(sh2, model(GaussianFamily{}, half, 50.0, 120)));
  const double b = logf(kotz_t1_shape_logdensity(sh2, model(GaussianFamily{}, half, 50.0, 160)));
  CHECK(std::abs(a - b) < 1e-6);
}

TEST_CASE("size-and-shape density") {
  std::mt19937_64 rng(7);
  const MatrixXd mu = small_mu();
  const MatrixXd Y = noisy(mu, 1.0, rng);
  const PseudoWishartShape sh = pw_coordinates(Y);
  ModelSpec g = model(GaussianFamily{}, MatrixXd(), 1.0, 30);
  ModelSpec k = model(KotzFamily{1.0, 0.5}, MatrixXd(), 1.0, 30);
  CHECK(logf(size_shape_logdensity(sh.V, 2, g)) == doctest::Approx(logf(size_shape_logdensity(sh.V, 2, k))).epsilon(1e-12));
  ModelSpec gm = model(GaussianFamily{}, mu, 1.0, 80);
  DensityDiagnostics d;
  CHECK(size_shape_logdensity(sh.V, 2, gm, VStarMode::cholesky, &d).sign() == 1);
  CHECK(d.series.converged);
}
