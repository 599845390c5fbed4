#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "epimon/errors.hpp"
#include "epimon/spectral.hpp"
#include "oracles.hpp"

using namespace epimon;

namespace {

ModelParams closed_form(double h = 0.05) {
  return ModelParams::constant(h, 3.0, 7.0, 0.0, 0.0, 1.0, {{0.0, 1.0 / 7.0}});
}

ModelParams textured(double h = 0.05) {
  return ModelParams::sampled(
      h, 4.0, 10.0, [](double x) { return 0.1 + 0.05 * x; }, [](double x) { return 0.02 * x; },
      [](double x) { return x < 5.0 ? std::exp(-0.3 * x) : 0.1; }, {{0.0, 0.4}});
}

}  // namespace

TEST_SUITE("spectral") {
  TEST_CASE("characteristic value of the closed-form model") {
    const auto p = closed_form();
    CHECK(characteristic_value(p, 0.0) == doctest::Approx(7.0).epsilon(1e-12));
    for (double lambda : {-0.5, -0.1, 0.05, 0.3, 1.0})
      CHECK(characteristic_value(p, lambda) ==
            doctest::Approx(oracle::closed_form_G(lambda, 3.0, 7.0)).epsilon(1e-10));
    CHECK(log_characteristic_value(p, 0.2) == doctest::Approx(std::log(characteristic_value(p, 0.2))));
  }

  TEST_CASE("characteristic value decreases in lambda") {
    const auto p = textured();
    double prev = characteristic_value(p, -1.0);
    for (double lambda = -0.95; lambda <= 1.0; lambda += 0.05) {
      const double g = characteristic_value(p, lambda);
      CHECK(g < prev);
      prev = g;
    }
  }

  TEST_CASE("eigenvalues of the closed-form model") {
    const auto p = closed_form();
    CHECK(std::abs(perron_eigenvalue(p, 1.0 / 7.0)) <= 1e-8);
    for (double mu : {2.0 / 7.0, 1.0 / 14.0, 0.05, 1.0})
      CHECK(perron_eigenvalue(p, mu) == doctest::Approx(oracle::closed_form_lambda(mu, 3.0, 7.0)).epsilon(1e-8));
    CHECK(perron_eigenvalue(p, 2.0 / 7.0) > 0.0);
    CHECK(perron_eigenvalue(p, 1.0 / 14.0) < 0.0);
    CHECK_THROWS_AS(perron_eigenvalue(p, 0.0), PreconditionError);
    CHECK_THROWS_AS(perron_eigenvalue(p, -1.0), PreconditionError);
  }

  TEST_CASE("eigenvalue increases with the control") {
    const auto p = textured();
    oracle::Gen g(31);
    for (int rep = 0; rep < 20; ++rep) {
      const double a = g.uniform(0.05, 2.0), b = g.uniform(0.05, 2.0);
      if (a == b) continue;
      CHECK((perron_eigenvalue(p, a) < perron_eigenvalue(p, b)) == (a < b));
    }
  }

  TEST_CASE("eigenvectors") {
    const auto flat = perron_solution(closed_form(), 1.0 / 7.0);
    for (double v : flat.n_E_bar) CHECK(v == doctest::Approx(1.0).epsilon(1e-7));
    for (double v : flat.n_I_bar) CHECK(v == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(flat.residual <= 1e-10);

    const double kei = 0.2, kir = 0.1, h = 0.05;
    const auto p = ModelParams::constant(h, 3.0, 7.0, kei, kir, 1.0, {{0.0, 0.5}});
    const auto e = perron_solution(p, 0.5);
    const double a = e.lambda + kei;
    for (std::size_t k = 0; k < e.n_E_bar.size(); ++k)
      CHECK(e.n_E_bar[k] == doctest::Approx(std::exp(-a * k * h)).epsilon(1e-10));
    const double inflow = kei / a * (1.0 - std::exp(-a * 3.0)) + std::exp(-a * 3.0);
    for (std::size_t k = 0; k < e.n_I_bar.size(); ++k)
      CHECK(e.n_I_bar[k] == doctest::Approx(inflow * std::exp(-(e.lambda + kir) * k * h)).epsilon(1e-10));
    CHECK(e.n_E_at_x_E_star == doctest::Approx(std::exp(-a * 3.0)).epsilon(1e-10));
    CHECK(e.concatenated().size() == e.n_E_bar.size() + e.n_I_bar.size());
    CHECK(e.residual <= 1e-10);
  }

  TEST_CASE("Hilbert projective distance") {
    const std::vector<double> a{1.0, 2.0}, b{1.0, 1.0};
    CHECK(hilbert_distance(a, b) == doctest::Approx(std::numbers::ln2));
    CHECK(hilbert_distance(a, a) == 0.0);
    const std::vector<double> scaled{3.0, 6.0};
    CHECK(hilbert_distance(a, scaled) == doctest::Approx(0.0).epsilon(1e-15));
    const std::vector<double> one{5.0}, other{0.1};
    CHECK(hilbert_distance(one, other) == 0.0);
    oracle::Gen g(32);
    for (int rep = 0; rep < 50; ++rep) {
      std::vector<double> u(6), v(6), w(6);
      for (int k = 0; k < 6; ++k) {
        u[k] = g.uniform(0.1, 5.0);
        v[k] = g.uniform(0.1, 5.0);
        w[k] = g.uniform(0.1, 5.0);
      }
      CHECK(hilbert_distance(u, v) == doctest::Approx(hilbert_distance(v, u)));
      CHECK(hilbert_distance(u, w) <= hilbert_distance(u, v) + hilbert_distance(v, w) + 1e-12);
    }
    const std::vector<double> zero{0.0, 1.0}, shorter{1.0};
    CHECK_THROWS_AS(hilbert_distance(a, zero), PreconditionError);
    CHECK_THROWS_AS(hilbert_distance(a, shorter), PreconditionError);
  }

  TEST_CASE("eigenvector distance bound") {
    const auto p = textured();
    oracle::Gen g(33);
    for (int rep = 0; rep < 10; ++rep) {
      const auto e1 = perron_solution(p, g.uniform(0.1, 1.5));
      const auto e2 = perron_solution(p, g.uniform(0.1, 1.5));
      const double d = hilbert_distance(e1.concatenated(), e2.concatenated());
      CHECK(d <= eigenvector_distance_bound(p, e1.lambda, e2.lambda) + 1e-6);
    }
    CHECK(eigenvector_distance_bound(p, 0.1, -0.1) == doctest::Approx(0.2 * 14.0));
  }

  TEST_CASE("tropical bound accumulates hop distances") {
    const auto p = textured();
    const auto e1 = perron_solution(p, 0.6), e2 = perron_solution(p, 0.2);
    const auto v0 = e1.concatenated();
    const std::vector<EigenSolution> eig{e1, e2};
    const auto tb = tropical_bound_delta(v0, eig);
    REQUIRE(tb.per_hop.size() == 2);
    CHECK(tb.per_hop[0] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(tb.per_hop[1] == doctest::Approx(hilbert_distance(e1.concatenated(), e2.concatenated())));
    CHECK(tb.delta == doctest::Approx(tb.per_hop[0] + tb.per_hop[1]));
  }

  TEST_CASE("doubling time") {
    CHECK(doubling_time(std::numbers::ln2 / 5.9) == doctest::Approx(5.9));
    CHECK(doubling_time(0.0) == std::numeric_limits<double>::infinity());
    CHECK(doubling_time(std::numbers::ln2) == doctest::Approx(1.0));
    CHECK(doubling_time(-std::numbers::ln2) == doctest::Approx(-1.0));
  }

  TEST_CASE("grid refinement converges") {
    const double coarse = perron_eigenvalue(textured(0.1), 0.4);
    const double fine = perron_eigenvalue(textured(0.025), 0.4);
    const double finest = perron_eigenvalue(textured(0.0125), 0.4);
    CHECK(std::abs(fine - finest) < std::abs(coarse - finest));
  }
}
