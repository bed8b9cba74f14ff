#include <doctest.h>

#include <cmath>
#include <random>

#include <json.hpp>

#include "gpc/collapse.hpp"
#include "gpc/errors.hpp"
#include "oracle.hpp"

using namespace gpc;

namespace {

double astar() { return default_townes().constants.astar; }

PotentialSpec coulomb() { return PotentialSpec(ZeroBackground{}, {{{0, 0}, 1.0, -1.0}}); }

SweepOptions small_options() {
  SweepOptions o;
  o.grid.n = 66;
  return o;
}

std::vector<double> ratios(std::initializer_list<double> r) {
  std::vector<double> a;
  for (double x : r) a.push_back(x * astar());
  return a;
}

Field2D gaussian_at(const Grid2D& g, Vec2 c, double w) {
  const oracle::Gaussian gauss{w};
  return Field2D::from_function(g, [&](Vec2 x) { return gauss.value(x.x - c.x, x.y - c.y); }).normalized();
}

}  // namespace

TEST_CASE("collapse context for a single Coulomb well") {
  const oracle::Townes t = oracle::townes({1.0});
  const CollapseContext ctx = collapse_context(coulomb(), default_townes());
  CHECK(ctx.constants.p == 1.0);
  CHECK(ctx.constants.h0 == 1.0);
  CHECK(ctx.beta == doctest::Approx(t.astar() * t.ip.at(1.0) / 2).epsilon(1e-9));
  CHECK(ctx.limit == doctest::Approx(-t.astar() * std::pow(t.ip.at(1.0), 2) / 4).epsilon(1e-9));
  CHECK_THROWS_AS(collapse_context(PotentialSpec(ZeroBackground{}, {{{0, 0}, 1.0, 2.0}}), default_townes()),
                  HypothesisError);
}

TEST_CASE("concentration is located at the well holding the mass") {
  const PotentialSpec two(ZeroBackground{}, {{{-2, 0}, 1.0, -1.0}, {{2, 0}, 1.0, -0.5}});
  const Grid2D g(6.0, 128);
  const Concentration c = locate_concentration(gaussian_at(g, {2, 0}, 0.3), two);
  CHECK(c.index == 1);
  CHECK(c.mass_fraction > 0.99);
  CHECK(c.collapsed);

  const Concentration broad = locate_concentration(gaussian_at(g, {0, 0}, 2.5), two);
  CHECK(broad.mass_fraction < 0.5);
  CHECK_FALSE(broad.collapsed);

  const Concentration single = locate_concentration(gaussian_at(g, {1, 1}, 2.0), coulomb());
  CHECK(single.index == 0);
  CHECK(single.mass_fraction == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(locate_concentration(gaussian_at(g, {}, 1.0), PotentialSpec{}), HypothesisError);
}

TEST_CASE("power-law fit on synthetic data") {
  const double as = 11.7;
  std::vector<double> a, e;
  for (double r : {0.9, 0.95, 0.98, 0.99, 0.995}) {
    a.push_back(r * as);
    e.push_back(-2.0 / (as - r * as));
  }
  const PowerLawFit f = fit_power_law(a, e, as);
  CHECK(f.exponent == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(f.prefactor == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(f.r2 == doctest::Approx(1.0).epsilon(1e-12));

  std::mt19937_64 rng(1);
  std::normal_distribution<double> noise(0.0, 0.01);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> en(e);
    for (auto& x : en) x *= 1.0 + noise(rng);
    REQUIRE(std::abs(fit_power_law(a, en, as).exponent + 1.0) < 0.02);
  }

  CHECK_THROWS_AS(fit_power_law({1.0, 2.0}, {-1.0, -2.0}, as), std::invalid_argument);
  CHECK_THROWS_AS(fit_power_law({1.0, 2.0, 3.0}, {-1.0, 2.0, -3.0}, as), std::invalid_argument);
  CHECK_THROWS_AS(fit_power_law({1.0, 2.0, 13.0}, {-1.0, -2.0, -3.0}, as), std::invalid_argument);
}

TEST_CASE("a short Coulomb sweep") {
  const SweepResult s = sweep(coulomb(), ratios({0.9, 0.95, 0.98}), small_options());
  REQUIRE(s.records.size() == 3);
  const double limit = s.context.limit;
  double prev_energy = INFINITY;
  for (const auto& r : s.records) {
    CAPTURE(r.a);
    CHECK(r.converged);
    CHECK_FALSE(r.refused);
    CHECK(r.chosen_point == 0);
    CHECK(r.mass_fraction > 0.99);
    CHECK(r.energy <= r.trial_min);
    CHECK(r.eps_a == doctest::Approx(astar() - r.a));
    CHECK(r.scaled_energy == doctest::Approx(r.energy * r.eps_a));
    CHECK(r.energy < prev_energy);
    CHECK(std::abs(r.scaled_energy / limit - 1.0) < 0.05);
    prev_energy = r.energy;
  }
  REQUIRE(s.last_rescaled);
  CHECK(s.last_rescaled->mass() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("a one-point schedule equals the direct pipeline") {
  const SweepOptions o = small_options();
  const double a = 0.95 * astar();
  const SweepResult s = sweep(coulomb(), {a}, o);
  REQUIRE(s.records.size() == 1);
  const SweepRecord& rec = s.records[0];

  const double eps = astar() - a;
  const double beta = s.context.beta;
  const double width = eps / beta;
  const Grid2D grid(std::min(o.grid.max_half_width, o.grid.widths * width), o.grid.n);
  SolveOptions so = o.solve;
  so.residual_tol = o.relative_residual_tol / (width * width);
  so.init = TownesInit{{}, 1.0 / width};
  const MinimizationResult direct = minimize(grid, coulomb(), a, so);
  CHECK(rec.energy == direct.energy.total);

  const Grid2D out(grid.half_width() / eps, grid.n());
  const Field2D w = rescale_extract(direct.u, {}, eps, out);
  const NormalizedProfile q0(default_townes().profile);
  const Field2D limit = Field2D::from_function(out, [&](Vec2 x) { return beta * q0.value(beta * norm(x)); });
  const FieldDistance d = h1_l2_distance(w, limit.normalized());
  CHECK(rec.h1_err == doctest::Approx(d.h1).epsilon(1e-6));
  CHECK(rec.l2_err == doctest::Approx(d.l2).epsilon(1e-6));
}

TEST_CASE("records below the resolution limit are refused") {
  SweepOptions o = small_options();
  o.grid.min_cells_per_width = 1000.0;
  const SweepResult s = sweep(coulomb(), ratios({0.9}), o);
  REQUIRE(s.records.size() == 1);
  CHECK(s.records[0].refused);
  CHECK_FALSE(s.records[0].note.empty());
}

TEST_CASE("sweep input validation") {
  const SweepOptions o = small_options();
  CHECK_THROWS_AS(sweep(coulomb(), {}, o), std::invalid_argument);
  CHECK_THROWS_AS(sweep(coulomb(), ratios({0.95, 0.9}), o), std::invalid_argument);
  CHECK_THROWS_AS(sweep(coulomb(), ratios({0.9, 1.0}), o), std::invalid_argument);
  CHECK_THROWS_AS(sweep(PotentialSpec(ZeroBackground{}, {{{0, 0}, 1.0, 1.0}}), ratios({0.9}), o),
                  HypothesisError);
}

TEST_CASE("far from a* the asymptotic checks are inconclusive") {
  const VerificationReport rep = verify_theorem2(coulomb(), ratios({0.3, 0.4, 0.5}), small_options());
  CHECK(rep.pass);
  int inconclusive = 0;
  for (const auto& c : rep.checks) {
    CAPTURE(c.name);
    CHECK(c.status != CheckStatus::fail);
    inconclusive += c.status == CheckStatus::inconclusive;
  }
  CHECK(inconclusive >= 3);
}

TEST_CASE("verification of a short sweep and its report") {
  const VerificationReport rep = verify_theorem2(coulomb(), ratios({0.9, 0.95, 0.98}), small_options());
  REQUIRE(rep.fit);
  CHECK(std::abs(rep.fit->exponent + 1.0) < 0.1);
  const auto j = nlohmann::json::parse(report_json(rep));
  CHECK(j.at("pass").get<bool>() == rep.pass);
  CHECK(j.at("records").size() == 3);
  CHECK(j.at("checks").size() == rep.checks.size());
  CHECK(j.at("constants").at("astar").get<double>() == astar());
  const VerificationReport again = assess(rep.sweep);
  CHECK(again.pass == rep.pass);
  CHECK(again.fit->exponent == rep.fit->exponent);
}
