#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "gpc/field.hpp"
#include "gpc/grid.hpp"
#include "gpc/potential.hpp"
#include "gpc/radial.hpp"

namespace gpc {

struct GaussianInit {
  Vec2 center{};
  double width = 1.0;
};

/// s * Q0(s |x - center|) from the default Townes profile.
struct TownesInit {
  Vec2 center{};
  double scale = 1.0;
};

/// An existing field; transplanted by bilinear interpolation when its grid
/// differs from the target grid (zero outside its domain).
struct FieldInit {
  std::shared_ptr<const Field2D> field;
};

using Initialization = std::variant<GaussianInit, TownesInit, FieldInit>;

enum class Preconditioner {
  /// v = u - tau H u, the plain explicit flow.
  none,
  /// v = u - tau d with d the tangent part of (-Lap + sigma)^(-1) H u, where
  /// sigma tracks the current energy scale. Same fixed points, far fewer
  /// iterations when the landscape is stiff.
  sobolev,
};

struct SolveOptions {
  /// Initial step; unset picks the stable explicit step (0.25 h^2 second
  /// order, 0.15 h^2 fourth order) or 1 for the preconditioned flow.
  std::optional<double> tau;
  int max_iters = 50000;
  double residual_tol = 1e-7;
  Initialization init = GaussianInit{};
  /// When set, used instead of init.
  std::shared_ptr<const Field2D> continuation;
  Stencil stencil = Stencil::fourth_order;
  PotentialSampling sampling = PotentialSampling::cell_average;
  Preconditioner preconditioner = Preconditioner::sobolev;
  bool record_history = true;

  /// Throws std::invalid_argument for nonpositive tau, residual_tol, or max_iters.
  void validate() const;
};

struct IterationRecord {
  double energy = 0.0;    ///< energy after the accepted step
  double residual = 0.0;  ///< residual of the iterate before the step
  double tau = 0.0;       ///< step used
  double mass = 0.0;      ///< mass right after projection
};

struct MinimizationResult {
  Field2D u;
  EnergyBreakdown energy;
  double mu = 0.0;
  double residual = 0.0;
  int iters = 0;
  bool converged = false;
  double initial_energy = 0.0;
  int rejected_steps = 0;
  std::vector<IterationRecord> history;
  std::string diagnostics;
};

/// Lagrange multiplier and Euler-Lagrange residual of a normalized field.
struct ResidualInfo {
  double mu = 0.0;
  double residual = 0.0;
};

/// H u = (-Lap + V - a u^2) u on interior nodes, zero on the boundary.
std::vector<double> apply_hamiltonian(const Grid2D& grid, std::span<const double> potential,
                                      double a, Stencil stencil, std::span<const double> u);

/// <-Lap u, u> + <V u, u> - (a / 2) <u^2, u^2> for any field with zero boundary.
double discrete_energy(const Grid2D& grid, std::span<const double> potential, double a,
                       Stencil stencil, std::span<const double> u);

ResidualInfo euler_lagrange_residual(const Grid2D& grid, std::span<const double> potential,
                                     double a, Stencil stencil, std::span<const double> u);

/// Normalized starting field for an initialization on grid.
Field2D initial_field(const Grid2D& grid, const Initialization& init);

double default_tau(const Grid2D& grid, const SolveOptions& opts);

/// Normalized gradient flow for the GP energy. Throws gpc::HypothesisError
/// when a is not below the computed a*, std::invalid_argument for bad input.
/// Non-convergence is reported through converged = false and diagnostics.
MinimizationResult minimize(const Grid2D& grid, const PotentialSpec& spec, double a,
                            const SolveOptions& opts);

/// Same flow with the potential already sampled on grid.
MinimizationResult minimize_sampled(const Grid2D& grid, std::span<const double> potential,
                                    double a, const SolveOptions& opts);

struct QuotientResult {
  Field2D u;
  double ratio = 0.0;
  double residual = 0.0;
  int iters = 0;
  bool converged = false;
  std::vector<IterationRecord> history;  ///< energy column holds the quotient
};

/// Minimizes the Gagliardo-Nirenberg quotient over normalized fields with the
/// same projected flow (its gradient is H u at a = current quotient, V = 0).
QuotientResult minimize_gn_quotient(const Grid2D& grid, const SolveOptions& opts);

/// E_a of the trial state A phi(x - x0) l Q0(l (x - x0)), with phi = 1 on
/// |y| <= eta, 0 on |y| >= 2 eta and a quintic smoothstep in between, and A
/// the exact normalization. Radial quadrature about x0; the potential term
/// integrates the singularity at x0 (when present) radially and everything
/// else in polar coordinates.
double trial_energy(double ell, Vec2 x0, const PotentialSpec& spec, double a,
                    const RadialProfile& profile, double cutoff_eta);

}  // namespace gpc
