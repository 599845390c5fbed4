#include <doctest.h>

#include "epimon/errors.hpp"
#include "epimon/stats.hpp"
#include "oracles.hpp"

using namespace epimon;
using namespace epimon::stats;

TEST_SUITE("stats") {
  TEST_CASE("reference quantiles") {
    CHECK(student_quantile(0.975, 5) == doctest::Approx(2.571).epsilon(5e-4 / 2.571));
    CHECK(student_quantile(0.95, 5) == doctest::Approx(2.015).epsilon(5e-4 / 2.015));
    for (double df : {1.0, 3.0, 8.0, 30.0}) CHECK(student_quantile(0.5, df) == doctest::Approx(0.0));
    CHECK(normal_quantile(0.975) == doctest::Approx(1.959964).epsilon(1e-6));
  }

  TEST_CASE("agreement with reference distributions") {
    for (double df : {1.0, 2.0, 5.0, 8.0, 18.0, 60.0}) {
      for (double p : {0.001, 0.025, 0.1, 0.3, 0.6, 0.9, 0.95, 0.999}) {
        CHECK(student_quantile(p, df) == doctest::Approx(oracle::student_quantile(p, df)).epsilon(1e-8));
      }
      for (double t : {-6.0, -1.5, -0.2, 0.0, 0.7, 2.0, 9.0})
        CHECK(student_cdf(t, df) == doctest::Approx(oracle::student_cdf(t, df)).epsilon(1e-10));
    }
    for (double p : {1e-6, 0.01, 0.2, 0.5, 0.8, 0.99})
      CHECK(normal_quantile(p) == doctest::Approx(oracle::normal_quantile(p)).epsilon(1e-9));
    for (double x : {-3.0, -1.0, 0.0, 0.4, 2.5}) CHECK(normal_quantile(normal_cdf(x)) == doctest::Approx(x));
  }

  TEST_CASE("domain errors") {
    CHECK_THROWS_AS(student_quantile(0.0, 5), PreconditionError);
    CHECK_THROWS_AS(student_quantile(1.0, 5), PreconditionError);
    CHECK_THROWS_AS(student_quantile(0.5, 0), PreconditionError);
    CHECK_THROWS_AS(normal_quantile(1.0), PreconditionError);
    CHECK_THROWS_AS(incomplete_beta(0.0, 1.0, 0.5), PreconditionError);
  }
}
