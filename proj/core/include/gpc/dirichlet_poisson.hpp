#pragma once

#include <memory>
#include <span>
#include <vector>

#include "gpc/grid.hpp"

namespace gpc {

/// Solves (-Lap + sigma) x = b on the interior nodes with zero Dirichlet data
/// using the type-I sine transform. The sine basis diagonalizes the
/// second-order operator exactly; for the fourth-order stencil the solve uses
/// that stencil's symbol, which is an exact inverse away from the boundary and
/// a symmetric positive definite approximation next to it.
class DirichletPoisson {
 public:
  DirichletPoisson(const Grid2D& grid, Stencil stencil);
  ~DirichletPoisson();
  DirichletPoisson(const DirichletPoisson&) = delete;
  DirichletPoisson& operator=(const DirichletPoisson&) = delete;

  /// rhs and out are full-grid arrays; boundary entries of rhs are ignored and
  /// those of out are set to zero. sigma must be positive.
  void solve(std::span<const double> rhs, double sigma, std::span<double> out);

  /// Tangent part of the preconditioned gradient,
  /// P g - (<P g, u> / <P u, u>) P u with P = (-Lap + sigma)^(-1), using three
  /// sine transforms. Boundary entries of out are zero.
  void tangent_direction(std::span<const double> g, std::span<const double> u, double sigma,
                         std::span<double> out);

  /// Eigenvalue of -Lap for sine mode k (1-based) along one axis.
  double eigenvalue(int k) const { return eig_[k - 1]; }

 private:
  struct Plan;
  void forward(std::span<const double> full, std::vector<double>& coeffs);
  void inverse(const std::vector<double>& coeffs, std::span<double> full);

  Grid2D grid_;
  std::vector<double> eig_;
  std::vector<double> c1_, c2_;
  std::unique_ptr<Plan> plan_;
};

}  // namespace gpc
