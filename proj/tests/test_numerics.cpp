#include "catsim/numerics.hpp"

#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "oracle_constants.hpp"

using namespace catsim;

TEST_CASE("neumaier summation compensates a hard case") {
  num::NeumaierSum s;
  s.add(1.0);
  s.add(1e100);
  s.add(1.0);
  s.add(-1e100);
  CHECK(s.value() == doctest::Approx(2.0).epsilon(1e-15));

  // 10^7 equal tiny terms: plain summation drifts, compensated must not
  num::NeumaierSum t;
  for (int i = 0; i < 10'000'000; ++i) t.add(0.1);
  CHECK(std::abs(t.value() - 1e6) < 1e-7);
}

TEST_CASE("incomplete gamma matches frozen references") {
  for (const auto& c : oracle::kGammaQ) {
    CHECK(num::gamma_q(c.a, c.x) == doctest::Approx(c.q).epsilon(1e-11));
    CHECK(num::gamma_p(c.a, c.x) == doctest::Approx(1.0 - c.q).epsilon(1e-10));
  }
  CHECK(num::gamma_q(2.0, 0.0) == 1.0);
  CHECK(num::gamma_p(2.0, 0.0) == 0.0);
  CHECK_THROWS_AS(num::gamma_q(-1.0, 1.0), std::invalid_argument);
}

TEST_CASE("chi-square survival function matches frozen references") {
  for (const auto& c : oracle::kChi2) {
    CHECK(num::chi_square_sf(c.x, c.dof) == doctest::Approx(c.sf).epsilon(1e-10));
  }
}

TEST_CASE("inverse normal cdf matches frozen references") {
  for (const auto& c : oracle::kNormalPpf) {
    if (c.z == 0.0) {
      CHECK(std::abs(num::inverse_normal_cdf(c.p)) < 1e-15);
    } else {
      CHECK(num::inverse_normal_cdf(c.p) ==
            doctest::Approx(c.z).epsilon(1e-13));
    }
  }
  CHECK_THROWS_AS(num::inverse_normal_cdf(0.0), std::invalid_argument);
  CHECK_THROWS_AS(num::inverse_normal_cdf(1.0), std::invalid_argument);
}

TEST_CASE("adaptive simpson integrates known functions") {
  const double one = num::adaptive_simpson(
      [](double x) { return 3.0 * x * x; }, 0.0, 1.0, 1e-12);
  CHECK(one == doctest::Approx(1.0).epsilon(1e-12));

  const double e1 = num::adaptive_simpson(
      [](double x) { return std::exp(-x); }, 0.0, 40.0, 1e-13);
  CHECK(e1 == doctest::Approx(1.0).epsilon(1e-11));

  const double pi = 4.0 * num::adaptive_simpson(
                              [](double x) { return 1.0 / (1.0 + x * x); },
                              0.0, 1.0, 1e-13);
  CHECK(pi == doctest::Approx(3.14159265358979324).epsilon(1e-12));
}

TEST_CASE("log_sum_exp handles extremes") {
  CHECK(num::log_sum_exp(0.0, 0.0) == doctest::Approx(std::log(2.0)));
  CHECK(num::log_sum_exp(-num::kInf, 3.0) == 3.0);
  CHECK(num::log_sum_exp(1000.0, 1000.0) ==
        doctest::Approx(1000.0 + std::log(2.0)));
  CHECK(num::log_sum_exp(2000.0, 100.0) == doctest::Approx(2000.0));
}
