#pragma once

#include <span>
#include <vector>

#include "gpc/grid.hpp"
#include "gpc/potential.hpp"

namespace gpc {

/// Energy pieces of E_a(u) = kinetic + potential - interaction.
struct EnergyBreakdown {
  double kinetic = 0.0;
  double potential = 0.0;
  double interaction = 0.0;  ///< (a / 2) * integral of u^4
  double total = 0.0;
  double boundary_mass = 0.0;  ///< mass in the outer band of the grid
  bool boundary_warning = false;
};

/// Inputs must have unit mass to this relative accuracy.
inline constexpr double kNormalizationTolerance = 1e-8;
/// Mass in the outer band above which a result carries the boundary warning.
inline constexpr double kBoundaryMassThreshold = 1e-6;

/// Mass of u in the band of nodes within a tenth of the half width of the edge.
double boundary_band_mass(const Field2D& u);

/// Breakdown with V already sampled on u's grid. Throws std::invalid_argument
/// for unnormalized input, a negative a, or a potential of the wrong size.
EnergyBreakdown energy_breakdown(const Field2D& u, std::span<const double> potential, double a,
                                 Stencil stencil = Stencil::fourth_order);
EnergyBreakdown energy_breakdown(const Field2D& u, const PotentialSpec& spec, double a,
                                 Stencil stencil = Stencil::fourth_order,
                                 PotentialSampling sampling = PotentialSampling::cell_average);

/// kinetic * mass / (quartic / 2), which reduces to the normalized quotient
/// for unit mass. Throws std::invalid_argument for a zero field.
double gn_ratio(const Field2D& u, Stencil stencil = Stencil::fourth_order);

/// w(x) = eps * u(center + eps * x) on out_grid, bilinearly interpolated and
/// renormalized to unit mass. Throws std::out_of_range when the mapped window
/// leaves u's domain and std::invalid_argument for eps <= 0.
Field2D rescale_extract(const Field2D& u, Vec2 center, double eps, const Grid2D& out_grid);

struct FieldDistance {
  double l2 = 0.0;
  double h1 = 0.0;
};

/// Throws std::invalid_argument when the grids differ.
FieldDistance h1_l2_distance(const Field2D& u, const Field2D& v,
                             Stencil stencil = Stencil::fourth_order);

/// Integral of u^2 over the disc of radius r about c (node indicator).
double disc_mass(const Field2D& u, Vec2 c, double r);

}  // namespace gpc
