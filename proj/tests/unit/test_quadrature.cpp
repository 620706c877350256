#include <cmath>

#include "doctest.h"
#include "pwshape/quadrature.hpp"
#include "pwshape/signed_log.hpp"

using namespace pwshape;

TEST_CASE("finite interval") {
  const QuadratureResult q = integrate([](double x) { return std::exp(x); }, 0.0, 1.0);
  CHECK(q.converged);
  CHECK(q.value == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-13));
  const QuadratureResult s = integrate([](double x) { return std::sqrt(x); }, 0.0, 1.0);
  CHECK(s.value == doctest::Approx(2.0 / 3.0).epsilon(1e-10));
}

TEST_CASE("half line in log form") {
  // int_0^inf r^a e^{-b r} dr = Gamma(a+1) / b^{a+1}, far outside double range
  for (double a : {0.5, 12.0, 300.0})
    for (double b : {0.01, 1.0, 40.0}) {
      const LogQuadratureResult q = integrate_half_line(
          [&](double r) { return SignedLogValue::from_log(a * std::log(r) - b * r); }, (a + 1) / b);
      CHECK(q.converged);
      CHECK(q.value.log_magnitude() == doctest::Approx(std::lgamma(a + 1) - (a + 1) * std::log(b)).epsilon(1e-11));
    }
}

TEST_CASE("signed integrand") {
  // int_0^inf (r - 2) e^{-r} dr = -1
  const LogQuadratureResult q = integrate_half_line(
      [](double r) { return SignedLogValue::from_value((r - 2.0) * std::exp(-r)); }, 1.0);
  CHECK(q.value.sign() == -1);
  CHECK(q.value.value() == doctest::Approx(-1.0).epsilon(1e-11));
}

TEST_CASE("signed log arithmetic") {
  const SignedLogValue a = SignedLogValue::from_value(3.0), b = SignedLogValue::from_value(-5.0);
  CHECK((a + b).value() == doctest::Approx(-2.0));
  CHECK((a * b).value() == doctest::Approx(-15.0));
  CHECK((a / b).value() == doctest::Approx(-0.6));
  CHECK((a - a).is_zero());
  const SignedLogValue big = SignedLogValue::from_log(1000.0);
  CHECK((big + big).log_magnitude() == doctest::Approx(1000.0 + std::log(2.0)));
  std::vector<SignedLogValue> terms = {big, -big, SignedLogValue::one()};
  CHECK(signed_log_sum({terms.data(), 2}).is_zero());
}
