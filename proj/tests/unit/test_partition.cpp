#include <cmath>

#include "doctest.h"
#include "pwshape/errors.hpp"
#include "pwshape/partition.hpp"
#include "pwshape/signed_log.hpp"

using namespace pwshape;

TEST_CASE("partitions of small weights") {
  CHECK(partitions(0, 2) == std::vector<Partition>{Partition{}});
  CHECK(partitions(3, 2) == std::vector<Partition>{Partition{3}, Partition{2, 1}});
  const auto p44 = partitions(4, 4);
  REQUIRE(p44.size() == 5);
  CHECK(p44[0] == Partition{4});
  CHECK(p44[1] == Partition{3, 1});
  CHECK(p44[2] == Partition{2, 2});
  CHECK(p44[3] == Partition{2, 1, 1});
  CHECK(p44[4] == Partition{1, 1, 1, 1});
}

TEST_CASE("partition counts follow the partition function") {
  // p(t) for t = 0..12 with no length limit
  const int p[] = {1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42, 56, 77};
  for (int t = 0; t <= 12; ++t) CHECK(partitions(t, t + 1).size() == static_cast<std::size_t>(p[t]));
  for (const auto& k : partitions(9, 3)) {
    CHECK(k.weight() == 9);
    CHECK(k.length() <= 3);
  }
}

TEST_CASE("partition invariants") {
  CHECK_THROWS_AS(Partition({1, 2}), DomainError);
  CHECK(Partition{3, 1}.conjugate() == Partition{2, 1, 1});
  CHECK(Partition{}.weight() == 0);
}

TEST_CASE("generalized Pochhammer symbol") {
  CHECK(gen_pochhammer(1.0, Partition{}) == 1.0);
  CHECK(gen_pochhammer(1.0, Partition{2}) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(gen_pochhammer(1.0, Partition{1, 1}) == doctest::Approx(0.5).epsilon(1e-15));
  // (a)_(2,1) = a(a+1)(a-1/2)
  const double a = 2.3;
  CHECK(gen_pochhammer(a, Partition{2, 1}) == doctest::Approx(a * (a + 1) * (a - 0.5)).epsilon(1e-14));
  const SignedLogValue lg = log_gen_pochhammer(0.2, Partition{1, 1});  // 0.2 * (-0.3)
  CHECK(lg.sign() == -1);
  CHECK(lg.value() == doctest::Approx(-0.06).epsilon(1e-14));
}

TEST_CASE("multivariate gamma") {
  CHECK(mv_gamma(1, 2.5) == doctest::Approx(std::tgamma(2.5)).epsilon(1e-14));
  CHECK(mv_gamma(2, 1.5) == doctest::Approx(M_PI / 2).epsilon(1e-14));
  CHECK_THROWS_AS(mv_gamma(2, 0.5), PoleError);
  CHECK(log_mv_gamma(3, 4.2) == doctest::Approx(std::log(mv_gamma(3, 4.2))).epsilon(1e-13));
  CHECK(rising_factorial(3.0, 4) == doctest::Approx(3.0 * 4 * 5 * 6));
}
