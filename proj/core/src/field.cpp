#include "gpc/field.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "gpc/quadrature.hpp"

namespace gpc {
namespace {

void require_normalized(const Field2D& u) {
  const double m = u.mass();
  if (!(std::abs(m - 1.0) <= kNormalizationTolerance)) {
    std::ostringstream msg;
    msg << "energy_breakdown: field mass " << m << " is not 1";
    throw std::invalid_argument(msg.str());
  }
}

double quartic_integral(const Field2D& u) {
  std::vector<double> sq(u.data().begin(), u.data().end());
  for (auto& v : sq) v *= v;
  return integrate_product(u.grid(), sq, sq);
}

}  // namespace

double boundary_band_mass(const Field2D& u) {
  const Grid2D& g = u.grid();
  const int n = g.n();
  const int band = std::max(1, (n - 1) / 20);
  std::vector<double> masked(g.size(), 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const int edge = std::min({i, j, n - 1 - i, n - 1 - j});
      if (edge < band) masked[g.index(i, j)] = u(i, j) * u(i, j);
    }
  }
  return integrate(g, masked);
}

EnergyBreakdown energy_breakdown(const Field2D& u, std::span<const double> potential, double a,
                                 Stencil stencil) {
  if (potential.size() != u.grid().size()) {
    throw std::invalid_argument("energy_breakdown: potential size does not match the grid");
  }
  if (!(a >= 0.0)) throw std::invalid_argument("energy_breakdown: a must be nonnegative");
  require_normalized(u);
  EnergyBreakdown e;
  e.kinetic = gradient_energy(u.grid(), u.data(), stencil);
  std::vector<double> vu(potential.begin(), potential.end());
  for (std::size_t k = 0; k < vu.size(); ++k) vu[k] *= u.data()[k];
  e.potential = integrate_product(u.grid(), vu, u.data());
  e.interaction = 0.5 * a * quartic_integral(u);
  e.total = e.kinetic + e.potential - e.interaction;
  e.boundary_mass = boundary_band_mass(u);
  e.boundary_warning = e.boundary_mass > kBoundaryMassThreshold;
  return e;
}

EnergyBreakdown energy_breakdown(const Field2D& u, const PotentialSpec& spec, double a,
                                 Stencil stencil, PotentialSampling sampling) {
  return energy_breakdown(u, sample_potential(spec, u.grid(), sampling), a, stencil);
}

double gn_ratio(const Field2D& u, Stencil stencil) {
  const double quartic = quartic_integral(u);
  if (!(quartic > 0.0)) throw std::invalid_argument("gn_ratio: zero field");
  return gradient_energy(u.grid(), u.data(), stencil) * u.mass() / (0.5 * quartic);
}

Field2D rescale_extract(const Field2D& u, Vec2 center, double eps, const Grid2D& out_grid) {
  if (!(eps > 0.0)) throw std::invalid_argument("rescale_extract: eps must be positive");
  const double L = out_grid.half_width();
  const Vec2 c = out_grid.center();
  for (Vec2 corner : {Vec2{c.x - L, c.y - L}, Vec2{c.x + L, c.y + L}}) {
    if (!u.grid().contains(center + eps * corner, 1e-9)) {
      throw std::out_of_range("rescale_extract: window exceeds the source domain");
    }
  }
  const int n = out_grid.n();
  std::vector<double> w(out_grid.size());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      w[out_grid.index(i, j)] = eps * interpolate(u, center + eps * out_grid.node(i, j));
    }
  }
  return Field2D(out_grid, std::move(w)).normalized();
}

FieldDistance h1_l2_distance(const Field2D& u, const Field2D& v, Stencil stencil) {
  if (!u.grid().same_geometry(v.grid())) {
    throw std::invalid_argument("h1_l2_distance: fields live on different grids");
  }
  std::vector<double> d(u.data().begin(), u.data().end());
  for (std::size_t k = 0; k < d.size(); ++k) d[k] -= v.data()[k];
  const double l2sq = integrate_product(u.grid(), d, d);
  const double grad = gradient_energy(u.grid(), d, stencil);
  return {std::sqrt(l2sq), std::sqrt(l2sq + grad)};
}

double disc_mass(const Field2D& u, Vec2 c, double r) {
  const Grid2D& g = u.grid();
  std::vector<double> masked(g.size(), 0.0);
  for (int i = 0; i < g.n(); ++i) {
    for (int j = 0; j < g.n(); ++j) {
      if (distance(g.node(i, j), c) <= r) masked[g.index(i, j)] = u(i, j) * u(i, j);
    }
  }
  return integrate(g, masked);
}

}  // namespace gpc
