#include <cmath>

#include "doctest.h"
#include "pwshape/errors.hpp"
#include "pwshape/generators.hpp"
#include "pwshape/oracles.hpp"

using namespace pwshape;

TEST_CASE("generator values") {
  CHECK(kotz_h({1.0, 0.5, 2}, 0.0) == doctest::Approx(1.0 / (2 * M_PI)).epsilon(1e-15));
  CHECK(kotz_h({2.0, 0.5, 10}, 0.0) == 0.0);
  CHECK(kotz_h({3.0, 1.0, 4}, 800.0) == doctest::Approx(0.0).scale(1.0));
  // Gaussian in M dimensions: (2 pi)^{-M/2} e^{-y/2}
  CHECK(kotz_h({1.0, 0.5, 10}, 3.0) == doctest::Approx(std::pow(2 * M_PI, -5.0) * std::exp(-1.5)).epsilon(1e-14));
  CHECK_THROWS_AS(validate({1.0, -1.0, 2}), DomainError);
  CHECK_THROWS_AS(validate({-1.0, 0.5, 2}), DomainError);
}

TEST_CASE("generator derivatives") {
  const KotzGenerator g2{2.0, 0.5, 10};
  for (double y : {0.5, 1.0, 5.0}) {
    CHECK(kotz_h_deriv(g2, 0, y) == doctest::Approx(kotz_h(g2, y)).epsilon(1e-14));
    // d/dy [c y e^{-Ry}] = c e^{-Ry} (1 - R y)
    const double c = std::exp(kotz_log_constant(g2));
    CHECK(kotz_h_deriv(g2, 1, y) == doctest::Approx(c * std::exp(-0.5 * y) * (1 - 0.5 * y)).epsilon(1e-13));
    CHECK(kotz_h_deriv(g2, 3, y, true) == doctest::Approx(kotz_h_deriv(g2, 3, y)).epsilon(1e-14));
  }
  CHECK(gaussian_h_deriv(2, 0, 0.0) == doctest::Approx(1.0 / (2 * M_PI)).epsilon(1e-15));
  CHECK(gaussian_h_deriv(2, 1, 0.0) == doctest::Approx(-0.5 / (2 * M_PI)).epsilon(1e-15));
  for (int k = 0; k <= 6; ++k) {
    CHECK(std::signbit(gaussian_h_deriv(10, k, 2.0)) == (k % 2 == 1));
    CHECK(gaussian_h_deriv(10, k, 2.0) == doctest::Approx(kotz_h_deriv({1.0, 0.5, 10}, k, 2.0)).epsilon(1e-14));
  }
}

TEST_CASE("derivatives against finite differences") {
  for (double T : {1.0, 2.0, 3.0, 2.5})
    for (int k = 0; k <= 4; ++k)
      for (double y : {0.5, 1.0, 5.0}) {
        const KotzGenerator g{T, 0.7, 6};
        const double fd = finite_difference([&](double x) { return kotz_h(g, x); }, y, k).value;
        CHECK(fd == doctest::Approx(kotz_h_deriv(g, k, y)).epsilon(1e-6));
      }
}

TEST_CASE("generator mass identity") {
  CHECK(generator_mass_check({1.0, 0.5, 4}) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(generator_mass_check({3.0, 0.5, 10}) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(generator_mass_check({1.0, 1.0, 2}) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(generator_mass_check({2.5, 2.0, 3}) == doctest::Approx(1.0).epsilon(1e-8));
}
