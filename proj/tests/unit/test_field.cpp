#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "gpc/field.hpp"
#include "gpc/grid.hpp"
#include "gpc/radial.hpp"
#include "oracle.hpp"
#include "random_fields.hpp"

using namespace gpc;

namespace {

Field2D gaussian_field(const Grid2D& g, double w, Vec2 c = {}) {
  const oracle::Gaussian gauss{w};
  return Field2D::from_function(g, [&](Vec2 x) { return gauss.value(x.x - c.x, x.y - c.y); });
}

double max_abs_diff(const Field2D& a, const Field2D& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.data().size(); ++k) m = std::max(m, std::abs(a.data()[k] - b.data()[k]));
  return m;
}

}  // namespace

TEST_CASE("trapezoid rule integrates constants exactly") {
  for (int n : {16, 33, 256}) {
    const Grid2D g(1.7, n, {0.3, -2.0});
    const std::vector<double> one(g.size(), 1.0);
    CHECK(integrate(g, one) == doctest::Approx(4 * 1.7 * 1.7).epsilon(1e-12));
  }
}

TEST_CASE("grid geometry") {
  const Grid2D g(2.0, 5 * 4, {1.0, -1.0});
  CHECK(g.x(0) == doctest::Approx(-1.0));
  CHECK(g.y(g.n() - 1) == doctest::Approx(1.0));
  CHECK(g.contains({1.0, -1.0}));
  CHECK_FALSE(g.contains({3.5, 0.0}));
  CHECK_THROWS_AS(Grid2D(1.0, 8), std::invalid_argument);
  CHECK_THROWS_AS(Grid2D(0.0, 32), std::invalid_argument);
  CHECK_THROWS_AS(Field2D(g, std::vector<double>(3)), std::invalid_argument);
  std::vector<double> neg(g.size(), 0.0);
  neg[5] = -1.0;
  CHECK_THROWS_AS(Field2D(g, neg), std::invalid_argument);
}

TEST_CASE("discrete integration by parts holds for both stencils") {
  std::mt19937_64 rng(3);
  for (Stencil s : {Stencil::second_order, Stencil::fourth_order}) {
    const Grid2D g(3.0, 48);
    const auto u = testing_support::random_interior(g, rng);
    const auto v = testing_support::random_interior(g, rng);
    std::vector<double> lu(g.size()), lv(g.size());
    neg_laplacian(g, u, s, lu);
    neg_laplacian(g, v, s, lv);
    const double uu = integrate_product(g, lu, u);
    CHECK(std::abs(uu - gradient_energy(g, u, s)) <= 1e-10 * uu);
    const double uv = integrate_product(g, lu, v), vu = integrate_product(g, lv, u);
    CHECK(std::abs(uv - vu) <= 1e-10 * std::abs(uu));
  }
}

TEST_CASE("Laplacian converges at the order of the stencil") {
  // u = exp(-|x|^2), -Lap u = (4 - 4 |x|^2) u.
  auto err = [](Stencil s, int n) {
    const Grid2D g(5.0, n);
    const Field2D u = Field2D::from_function(g, [](Vec2 x) { return std::exp(-(x.x * x.x + x.y * x.y)); });
    std::vector<double> lu(g.size());
    neg_laplacian(g, u.data(), s, lu);
    double e = 0.0;
    for (int i = 2; i + 2 < n; ++i) {
      for (int j = 2; j + 2 < n; ++j) {
        const Vec2 x = g.node(i, j);
        const double r2 = x.x * x.x + x.y * x.y;
        e = std::max(e, std::abs(lu[g.index(i, j)] - (4 - 4 * r2) * std::exp(-r2)));
      }
    }
    return e;
  };
  const double o2 = std::log2(err(Stencil::second_order, 65) / err(Stencil::second_order, 129));
  const double o4 = std::log2(err(Stencil::fourth_order, 65) / err(Stencil::fourth_order, 129));
  CHECK(o2 > 1.9);
  CHECK(o4 > 3.5);
}

TEST_CASE("kinetic energy converges at second order for the second-order scheme") {
  auto kin = [](int n) {
    const Grid2D g(8.0, n);
    return energy_breakdown(gaussian_field(g, 1.0).normalized(), std::vector<double>(g.size(), 0.0),
                            0.0, Stencil::second_order)
        .kinetic;
  };
  const double k1 = kin(65), k2 = kin(129), k3 = kin(257);
  const double order = std::log2(std::abs(k1 - k2) / std::abs(k2 - k3));
  CHECK(order > 1.9);
  CHECK(std::abs(k3 - 1.0) < 1e-3);
}

TEST_CASE("energy of a normalized Gaussian") {
  const Grid2D g(8.0, 256);
  const Field2D u = gaussian_field(g, 1.0).normalized();
  const std::vector<double> zero(g.size(), 0.0);
  for (double a : {0.0, 1.0, 5.0, 11.0}) {
    const EnergyBreakdown e = energy_breakdown(u, zero, a);
    CAPTURE(a);
    CHECK(std::abs(e.total - (1.0 - a / (4 * std::numbers::pi))) < 1e-3);
    CHECK(e.total == doctest::Approx(e.kinetic + e.potential - e.interaction));
    CHECK_FALSE(e.boundary_warning);
  }
  const PotentialSpec harmonic(HarmonicBackground{}, {});
  CHECK(std::abs(energy_breakdown(u, harmonic, 0.0).total - 2.0) < 1e-3);
}

TEST_CASE("energy preconditions") {
  const Grid2D g(8.0, 64);
  const Field2D u = gaussian_field(g, 1.0);
  const Field2D doubled(g, [&] {
    std::vector<double> d(u.data().begin(), u.data().end());
    for (auto& x : d) x *= 2.0;
    return d;
  }());
  const std::vector<double> zero(g.size(), 0.0);
  CHECK_THROWS_AS(energy_breakdown(doubled, zero, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(energy_breakdown(u.normalized(), zero, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(energy_breakdown(u.normalized(), std::vector<double>(3), 0.0), std::invalid_argument);
}

TEST_CASE("boundary warning for a state that reaches the edge") {
  const Grid2D g(3.0, 64);
  const EnergyBreakdown e =
      energy_breakdown(gaussian_field(g, 2.0).normalized(), std::vector<double>(g.size(), 0.0), 0.0);
  CHECK(e.boundary_warning);
  CHECK(e.boundary_mass > kBoundaryMassThreshold);
}

TEST_CASE("GN ratio of Gaussians and of the Townes profile") {
  const Grid2D g(8.0, 256);
  for (double w : {0.5, 1.0, 2.0}) {
    CAPTURE(w);
    CHECK(std::abs(gn_ratio(gaussian_field(g, w)) - 4 * std::numbers::pi) < 1e-3);
  }
  const double astar = default_townes().constants.astar;
  const NormalizedProfile q0(default_townes().profile);
  for (double beta : {0.5, 1.0, 2.0}) {
    const Grid2D gq(12.0 / std::min(beta, 1.0), 256);
    const Field2D u = Field2D::from_function(gq, [&](Vec2 x) { return beta * q0.value(beta * norm(x)); });
    CAPTURE(beta);
    CHECK(std::abs(gn_ratio(u) - astar) < 1e-2 * astar);
    CHECK(gn_ratio(u) >= astar * (1 - 1e-2));
  }
  CHECK_THROWS_AS(gn_ratio(Field2D(g)), std::invalid_argument);
}

TEST_CASE("rescale_extract inverts a dilation") {
  const double eps = 0.5;
  const Vec2 c{0.3, -0.2};
  const oracle::Gaussian phi{1.0};
  const Grid2D src(6.0, 512);
  const Field2D u = Field2D::from_function(src, [&](Vec2 x) {
    return phi.value((x.x - c.x) / eps, (x.y - c.y) / eps) / eps;
  });
  const Grid2D out(4.0, 128);
  const Field2D w = rescale_extract(u, c, eps, out);
  const Field2D expect = gaussian_field(out, 1.0);
  CHECK(max_abs_diff(w, expect) < 1e-3);
  CHECK(w.mass() == doctest::Approx(1.0).epsilon(1e-12));

  const Field2D id = rescale_extract(u.normalized(), {}, 1.0, src);
  CHECK(max_abs_diff(id, u.normalized()) < 1e-12);

  CHECK_THROWS_AS(rescale_extract(u, c, eps, Grid2D(20.0, 64)), std::out_of_range);
  CHECK_THROWS_AS(rescale_extract(u, c, 0.0, out), std::invalid_argument);
}

TEST_CASE("H1 and L2 distances") {
  const Grid2D g(8.0, 256);
  const Field2D u = gaussian_field(g, 1.0).normalized();
  const FieldDistance self = h1_l2_distance(u, u);
  CHECK(self.l2 == 0.0);
  CHECK(self.h1 == 0.0);
  CHECK(h1_l2_distance(u, Field2D(g)).l2 == doctest::Approx(1.0).epsilon(1e-10));
  // Distance between unit-width Gaussians at offset 1: l2^2 = 2 - 2 exp(-1/4).
  const Field2D v = gaussian_field(g, 1.0, {1.0, 0.0}).normalized();
  CHECK(std::abs(std::pow(h1_l2_distance(u, v).l2, 2) - (2 - 2 * std::exp(-0.25))) < 1e-3);
  CHECK_THROWS_AS(h1_l2_distance(u, Field2D(Grid2D(8.0, 128))), std::invalid_argument);
}

TEST_CASE("disc mass of a Gaussian") {
  const Grid2D g(8.0, 256);
  const Field2D u = gaussian_field(g, 1.0).normalized();
  const oracle::Gaussian gauss{1.0};
  for (double r : {0.5, 1.0, 2.0}) {
    CAPTURE(r);
    CHECK(std::abs(disc_mass(u, {}, r) - gauss.disc_mass(r)) < 2e-2);
  }
  CHECK(disc_mass(u, {}, 100.0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("bilinear interpolation is exact for bilinear data") {
  const Grid2D g(1.0, 17);
  std::vector<double> d(g.size());
  for (int i = 0; i < g.n(); ++i)
    for (int j = 0; j < g.n(); ++j) d[g.index(i, j)] = 3 + g.x(i) + 2 * g.y(j) + g.x(i) * g.y(j) + 2;
  const Field2D f(g, d);
  CHECK(interpolate(f, {0.123, -0.77}) == doctest::Approx(5 + 0.123 - 1.54 - 0.123 * 0.77).epsilon(1e-13));
  CHECK_THROWS_AS(interpolate(f, {1.5, 0.0}), std::out_of_range);
}
