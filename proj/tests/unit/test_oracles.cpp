#include <cmath>
#include <random>

#include "doctest.h"
#include "pwshape/densities.hpp"
#include "pwshape/errors.hpp"
#include "pwshape/oracles.hpp"

using namespace pwshape;

TEST_CASE("finite differences of exp") {
  for (double y : {-1.0, 0.5, 3.0})
    for (int k = 1; k <= 4; ++k) CHECK(finite_difference([](double x) { return std::exp(x); }, y, k).value ==
                                       doctest::Approx(std::exp(y)).epsilon(1e-8));
  CHECK(finite_difference([](double x) { return std::sin(x); }, 0.7, 0).value == std::sin(0.7));
}

TEST_CASE("radial quadrature of the Gaussian-type generator") {
  // T = 1: int r^a c e^{-(Ar+B)R} dr = c e^{-BR} Gamma(a+1) / (AR)^{a+1}
  const KotzGenerator g{1.0, 0.5, 6};
  const double c = kotz_log_constant(g);
  for (double a : {0.5, 7.0, 40.0}) {
    const double A = 1.7, B = 3.0;
    const double ref = c - 0.5 * B + std::lgamma(a + 1) - (a + 1) * std::log(0.5 * A);
    CHECK(radial_quadrature(a, KotzFamily{1.0, 0.5}, 6, A, B, 0).log_magnitude() == doctest::Approx(ref).epsilon(1e-10));
    const double twice = radial_quadrature(a, KotzFamily{1.0, 0.5}, 6, 2 * A, B, 0).log_magnitude();
    CHECK(twice - ref == doctest::Approx(-(a + 1) * std::log(2.0)).epsilon(1e-10));
  }
}

TEST_CASE("central radial integral matches the gamma form") {
  // int r^e h(r A) dr = A^{-(e+1)} Gamma(e+1) ... collapses to Gamma(M/2)/pi^{M/2} scaling for any generator
  for (double T : {1.0, 2.0, 3.0}) {
    const int M = 10;
    const double e = 4.0, A = 0.9;  // e + 1 = M/2
    const double q = radial_quadrature(e, KotzFamily{T, 0.5}, M, A, 0.0, 0).log_magnitude();
    CHECK(q == doctest::Approx(std::lgamma(5.0) - 5.0 * std::log(M_PI) - 5.0 * std::log(A)).epsilon(1e-10));
  }
}

TEST_CASE("Monte Carlo normalization") {
  SUBCASE("chart Jacobian over the sphere area") {
    // N = 3, K = 2: the chart is the unit sphere in (v11, v12, v22); J/(4 pi)
    // integrates to the area fraction of the PSD cone, counted here directly
    std::mt19937_64 rng(5);
    std::normal_distribution<double> nd;
    long hit = 0;
    const long total = 400000;
    for (long i = 0; i < total; ++i) {
      const double a = nd(rng), b = nd(rng), c = nd(rng);
      hit += (a >= 0 && c >= 0 && a * c >= b * b);
    }
    const double frac = static_cast<double>(hit) / total;
    McOptions o;
    o.samples = 40000;
    o.proposal = McProposal::uniform;
    const OracleReport r = mc_normalization(
        [](const PseudoWishartShape& s) { return s.log_jacobian - std::log(4 * M_PI); }, 3, 2, o);
    const double se = std::hypot(r.std_error, std::sqrt(frac * (1 - frac) / total));
    CHECK(std::abs(r.computed - frac) < 4 * se);
  }
  SUBCASE("standard error shrinks like 1/sqrt(n)") {
    McOptions a;
    a.samples = 20000;
    McOptions b = a;
    b.samples = 40000;
    auto f = [](const PseudoWishartShape& s) { return central_invariant_logdensity(s, 1.0); };
    const double ratio = mc_normalization(f, 3, 2, a).std_error / mc_normalization(f, 3, 2, b).std_error;
    CHECK(ratio == doctest::Approx(std::sqrt(2.0)).epsilon(0.15));
  }
  SUBCASE("same seed, same answer") {
    McOptions o;
    o.samples = 5000;
    auto f = [](const PseudoWishartShape& s) { return central_invariant_logdensity(s, 1.0); };
    CHECK(mc_normalization(f, 3, 2, o).computed == mc_normalization(f, 3, 2, o).computed);
  }
  CHECK_THROWS_AS(mc_normalization([](const PseudoWishartShape&) { return 0.0; }, 6, 2), DomainError);
}

TEST_CASE("truncation study") {
  const TruncationStudy flat = truncation_study([](int) { return 2.5; }, {20, 40, 60});
  CHECK(flat.stabilized_at == 20);
  for (const auto& r : flat.rows) CHECK(r.value == 2.5);
  // geometric tail: increments shrink after stabilization
  const TruncationStudy geo = truncation_study([](int t) { return 1.0 - std::pow(0.8, t); }, {20, 40, 60, 80, 100});
  CHECK(geo.stabilized_at == 80);
  for (std::size_t i = 2; i < geo.rows.size(); ++i) CHECK(geo.rows[i].increment < geo.rows[i - 1].increment);
}

TEST_CASE("report verdict follows the tolerance") {
  CHECK(make_report("x", 1.001, 1.0, 1e-2).pass);
  CHECK_FALSE(make_report("x", 1.1, 1.0, 1e-2).pass);
}
