#include <doctest.h>

#include <cmath>
#include <random>

#include "gpc/closedform.hpp"
#include "gpc/radial.hpp"
#include "oracle.hpp"

using namespace gpc;

TEST_CASE("unit parameters") {
  const CollapseConstants c{1.0, 1.0, 1.0, 1.0};
  CHECK(beta_value(c) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(energy_limit(c) == doctest::Approx(-0.25).epsilon(1e-15));
  CHECK(lambda_objective(1.0, c) == doctest::Approx(0.0));
  CHECK(lambda_objective(0.5, c) == doctest::Approx(-0.25).epsilon(1e-15));
  const LambdaMinimum m = minimize_lambda(c);
  CHECK(m.lambda_star == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(m.value == doctest::Approx(-0.25).epsilon(1e-12));
}

TEST_CASE("integer example") {
  const CollapseConstants c{1.0, 2.0, 3.0, 5.0};
  CHECK(beta_value(c) == doctest::Approx(15.0).epsilon(1e-14));
  CHECK(energy_limit(c) == doctest::Approx(-75.0).epsilon(1e-14));
  CHECK(lambda_objective(15.0, c) == doctest::Approx(-75.0).epsilon(1e-14));
  CHECK(minimize_lambda(c).value == doctest::Approx(-75.0).epsilon(1e-12));
}

TEST_CASE("objective at beta equals the energy limit") {
  for (double p : {0.3, 1.0, 1.7}) {
    const CollapseConstants c{p, 1.3, 11.7, 2.1};
    CAPTURE(p);
    CHECK(std::abs(lambda_objective(beta_value(c), c) - energy_limit(c)) <=
          1e-12 * std::abs(energy_limit(c)));
  }
}

TEST_CASE("Coulomb constants from the oracle profile") {
  const oracle::Townes t = oracle::townes({1.0});
  const CollapseConstants oc{1.0, 1.0, t.astar(), t.ip.at(1.0)};
  const CollapseConstants lc{1.0, 1.0, default_townes().constants.astar,
                             singular_moment(*default_townes().profile, 1.0)};
  // beta = a* I_1 / 2 and limit = -a* I_1^2 / 4 for p = 1, h0 = 1.
  const double beta = t.astar() * t.ip.at(1.0) / 2;
  const double limit = -t.astar() * t.ip.at(1.0) * t.ip.at(1.0) / 4;
  CHECK(beta_value(oc) == doctest::Approx(beta).epsilon(1e-14));
  CHECK(energy_limit(oc) == doctest::Approx(limit).epsilon(1e-14));
  CHECK(beta_value(lc) == doctest::Approx(beta).epsilon(1e-9));
  CHECK(energy_limit(lc) == doctest::Approx(limit).epsilon(1e-9));
}

TEST_CASE("golden-section minimum agrees with the closed forms for random parameters") {
  std::mt19937_64 rng(20261017);
  std::uniform_real_distribution<double> pd(0.1, 1.9);
  std::uniform_real_distribution<double> logd(std::log(1e-2), std::log(1e2));
  for (int k = 0; k < 1000; ++k) {
    const CollapseConstants c{pd(rng), std::exp(logd(rng)), std::exp(logd(rng)),
                              std::exp(logd(rng))};
    const LambdaMinimum m = minimize_lambda(c);
    const double beta = beta_value(c), limit = energy_limit(c);
    CAPTURE(c.p);
    REQUIRE(std::abs(m.lambda_star - beta) <= 1e-8 * beta);
    REQUIRE(std::abs(m.value - limit) <= 1e-10 * std::abs(limit));
    REQUIRE(limit < 0.0);
  }
}

TEST_CASE("beta scales with h0 I_p") {
  const CollapseConstants c{0.7, 1.5, 4.0, 2.0};
  const double t = 3.0;
  const CollapseConstants ct{0.7, 1.5 * t, 4.0, 2.0};
  CHECK(beta_value(ct) == doctest::Approx(beta_value(c) * std::pow(t, 1.0 / 1.3)).epsilon(1e-13));
}

TEST_CASE("invalid constants are rejected") {
  CHECK_THROWS_AS(beta_value({2.0, 1.0, 1.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(beta_value({0.0, 1.0, 1.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(energy_limit({1.0, -1.0, 1.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(minimize_lambda({1.0, 1.0, 0.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(minimize_lambda({1.0, 1.0, 1.0, 1.0}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(lambda_objective(0.0, {1.0, 1.0, 1.0, 1.0}), std::invalid_argument);
}
