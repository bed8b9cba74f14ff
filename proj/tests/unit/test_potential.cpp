#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "gpc/errors.hpp"
#include "gpc/grid.hpp"
#include "gpc/potential.hpp"
#include "oracle.hpp"

using namespace gpc;

namespace {

PotentialSpec coulomb(std::optional<double> reg = std::nullopt) {
  return PotentialSpec(ZeroBackground{}, {{{0, 0}, 1.0, -1.0}}, reg);
}

}  // namespace

TEST_CASE("evaluate at simple points") {
  CHECK(evaluate(coulomb(0.0), {3, 4}) == doctest::Approx(-0.2).epsilon(1e-15));
  CHECK_THROWS_AS(evaluate(coulomb(0.0), {0, 0}), std::domain_error);
  CHECK_THROWS_AS(evaluate(coulomb(), {0, 0}), std::domain_error);

  const PotentialSpec pair(ZeroBackground{}, {{{1, 0}, 1.0, -1.0}, {{-1, 0}, 1.0, 1.0}});
  CHECK(evaluate(pair, {0, 0}) == doctest::Approx(0.0));
  const PotentialSpec trapped(HarmonicBackground{2.0, {0.5, 0}},
                              {{{1, 0}, 1.0, -1.0}, {{-1, 0}, 1.0, 1.0}});
  CHECK(evaluate(trapped, {0, 0}) == doctest::Approx(4.0 * 0.25).epsilon(1e-15));
}

TEST_CASE("distance floor only acts inside reg_delta") {
  const double delta = 0.3;
  const PotentialSpec a(ZeroBackground{}, {{{0.2, -0.1}, 0.7, -2.0}, {{2, 1}, 1.4, 0.5}}, 0.0);
  const PotentialSpec b = PotentialSpec(ZeroBackground{}, a.points(), delta);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> d(-3, 3);
  for (int k = 0; k < 2000; ++k) {
    const Vec2 x{d(rng), d(rng)};
    bool far = true;
    for (const auto& s : a.points()) far = far && distance(x, s.x) >= delta;
    if (far) REQUIRE(evaluate(a, x) == evaluate(b, x));
  }
  CHECK(evaluate(b, {0.2, -0.1}) == doctest::Approx(-2.0 * std::pow(delta, -0.7) + 0.5 * std::pow(std::hypot(1.8, 1.1), -1.4)));
}

TEST_CASE("classification") {
  SUBCASE("deepest well of the dominant power") {
    const PotentialSpec s(ZeroBackground{}, {{{0, 0}, 1.0, -1.0}, {{4, 0}, 1.0, -0.5}});
    const SelectionData d = classify(s);
    CHECK(d.p == 1.0);
    CHECK(d.h0 == 1.0);
    CHECK(d.candidates == std::vector<std::size_t>{0});
  }
  SUBCASE("positive wells do not set the power") {
    const PotentialSpec s(ZeroBackground{}, {{{0, 0}, 1.5, 2.0}, {{4, 0}, 0.5, -3.0}});
    const SelectionData d = classify(s);
    CHECK(d.p == 0.5);
    CHECK(d.h0 == 3.0);
    CHECK(d.candidates == std::vector<std::size_t>{1});
  }
  SUBCASE("ties are all candidates") {
    const PotentialSpec s(ZeroBackground{}, {{{0, 0}, 1.0, -1.0}, {{3, 0}, 1.0, -1.0}});
    CHECK(classify(s).candidates.size() == 2);
  }
  SUBCASE("no negative well") {
    const PotentialSpec s(ZeroBackground{}, {{{0, 0}, 1.0, 1.0}});
    CHECK_THROWS_AS(classify(s), HypothesisError);
    CHECK_THROWS_AS(classify(PotentialSpec{}), HypothesisError);
  }
}

TEST_CASE("classification is invariant under permutation of the points") {
  std::vector<SingularPoint> pts{{{0, 0}, 1.0, -1.0}, {{3, 0}, 1.5, -0.2}, {{0, 3}, 1.5, -0.7},
                                 {{3, 3}, 0.4, 2.0}};
  const SelectionData ref = classify(PotentialSpec(ZeroBackground{}, pts));
  const SingularPoint deepest = pts[ref.candidates.at(0)];
  std::sort(pts.begin(), pts.end(), [](auto& a, auto& b) { return a.h < b.h; });
  do {
    const SelectionData d = classify(PotentialSpec(ZeroBackground{}, pts));
    REQUIRE(d.p == ref.p);
    REQUIRE(d.h0 == ref.h0);
    REQUIRE(d.candidates.size() == 1);
    REQUIRE(pts[d.candidates[0]].x == deepest.x);
  } while (std::next_permutation(pts.begin(), pts.end(), [](auto& a, auto& b) { return a.h < b.h; }));
}

TEST_CASE("evaluate is invariant under simultaneous translation") {
  const PotentialSpec s(HarmonicBackground{1.3, {0.1, 0.2}},
                        {{{0, 0}, 1.0, -1.0}, {{2, -1}, 0.6, -0.4}});
  const Vec2 shift{3.7, -1.2};
  const PotentialSpec t = s.translated(shift);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> d(-4, 4);
  for (int k = 0; k < 200; ++k) {
    const Vec2 x{d(rng), d(rng)};
    REQUIRE(evaluate(t, x + shift) == doctest::Approx(evaluate(s, x)).epsilon(1e-12));
  }
}

TEST_CASE("constructor validation") {
  CHECK_THROWS_AS(PotentialSpec(ZeroBackground{}, {{{0, 0}, 2.0, -1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(PotentialSpec(ZeroBackground{}, {{{0, 0}, 0.0, -1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(PotentialSpec(ZeroBackground{}, {{{1, 1}, 1.0, -1.0}, {{1, 1}, 0.5, -2.0}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(PotentialSpec(ZeroBackground{}, {{{0, 0}, 1.0, -1.0}}, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(PotentialSpec(TabulatedBackground{}, {}), std::invalid_argument);
  CHECK(PotentialSpec(ZeroBackground{}, {{{0, 0}, 1, -1}, {{3, 4}, 1, -1}}).min_separation() == 5.0);
  CHECK(std::isinf(coulomb().min_separation()));
}

TEST_CASE("tabulated background interpolates and clamps") {
  const Grid2D g(1.0, 21);
  auto table = std::make_shared<const Field2D>(
      Field2D::from_function(g, [](Vec2 x) { return 1.0 + x.x + 2.0 * x.y + 3.0; }));
  // from_function zeroes the boundary ring, so probe strictly inside.
  const PotentialSpec s(TabulatedBackground{table}, {});
  CHECK(s.background_at({0.25, -0.3}) == doctest::Approx(4.0 + 0.25 - 0.6).epsilon(1e-12));
  CHECK(s.background_at({5.0, 0.0}) >= 0.0);
}

TEST_CASE("rectangle integrals match the polar oracle") {
  struct Box { double x0, x1, y0, y1; };
  for (double p : {0.3, 1.0, 1.5, 1.9}) {
    for (Box b : {Box{0.1, 0.7, 0.2, 0.5}, Box{-0.3, 0.5, -0.2, 0.7}, Box{0.0, 0.4, 0.0, 0.4},
                  Box{-1.0, -0.1, 0.3, 2.0}, Box{-0.05, 0.05, -0.05, 0.05}}) {
      CAPTURE(p);
      CAPTURE(b.x0);
      const double ref = oracle::rectangle(b.x0, b.x1, b.y0, b.y1, p);
      CHECK(std::abs(rectangle_integral(b.x0, b.x1, b.y0, b.y1, p) - ref) <= 1e-10 * std::abs(ref));
    }
  }
}

TEST_CASE("point sampling uses the half-spacing floor") {
  const Grid2D g(1.0, 20);
  const auto v = sample_potential(coulomb(), g, PotentialSampling::point);
  const double h = g.spacing();
  for (int i = 0; i < g.n(); ++i) {
    for (int j = 0; j < g.n(); ++j) {
      const double d = std::max(norm(g.node(i, j)), 0.5 * h);
      REQUIRE(v[g.index(i, j)] == doctest::Approx(-1.0 / d).epsilon(1e-14));
    }
  }
}

TEST_CASE("corrected cell averages are fourth-order accurate away from the singularity") {
  double prev = 0.0;
  for (int n : {40, 80}) {
    const Grid2D g(2.0, n);
    const auto v = sample_potential(coulomb(), g, PotentialSampling::cell_average);
    double err = 0.0;
    for (int i = 1; i + 1 < n; ++i) {
      for (int j = 1; j + 1 < n; ++j) {
        const double r = norm(g.node(i, j));
        if (r > 1.0) err = std::max(err, std::abs(v[g.index(i, j)] + 1.0 / r));
      }
    }
    if (prev > 0.0) CHECK(prev / err > 12.0);
    prev = err;
  }
}

TEST_CASE("potential energy of a Gaussian against the closed form") {
  const oracle::Gaussian gauss{1.0};
  const double exact = -gauss.coulomb();
  auto errors = [&](int n) {
    const Grid2D g(8.0, n);
    std::vector<double> u2(g.size());
    for (int i = 0; i < g.n(); ++i)
      for (int j = 0; j < g.n(); ++j) u2[g.index(i, j)] = std::pow(gauss.value(g.x(i), g.y(j)), 2);
    const auto cell = sample_potential(coulomb(), g, PotentialSampling::cell_average);
    const auto point = sample_potential(coulomb(), g, PotentialSampling::point);
    return std::pair{std::abs(integrate_product(g, cell, u2) - exact) / std::abs(exact),
                     std::abs(integrate_product(g, point, u2) - exact) / std::abs(exact)};
  };
  const auto [cell128, point128] = errors(128);
  const auto [cell256, point256] = errors(256);
  CHECK(cell256 < 5e-5);
  CHECK(cell128 / cell256 > 6.0);
  CHECK(cell256 < 1e-2 * point256);
  CHECK(point128 / point256 == doctest::Approx(2.0).epsilon(0.1));

  const Grid2D g(8.0, 256);
  std::vector<double> u2(g.size());
  for (int i = 0; i < g.n(); ++i)
    for (int j = 0; j < g.n(); ++j) u2[g.index(i, j)] = std::pow(gauss.value(g.x(i), g.y(j)), 2);
  const PotentialSpec harmonic(HarmonicBackground{}, {});
  const auto vh = sample_potential(harmonic, g);
  CHECK(integrate_product(g, vh, u2) == doctest::Approx(gauss.second_moment()).epsilon(1e-8));
}

TEST_CASE("negative wells lists the attractive points") {
  const PotentialSpec s(ZeroBackground{}, {{{0, 0}, 1, 1}, {{1, 0}, 1, -1}, {{2, 0}, 0.5, -0.1}});
  CHECK(negative_wells(s) == std::vector<std::size_t>{1, 2});
}
