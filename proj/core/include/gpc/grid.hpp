#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "gpc/vec2.hpp"

namespace gpc {

/// Square node grid on center + [-L, L]^2 with n nodes per side. Node (i, j)
/// sits at center + (-L + i h, -L + j h), h = 2L / (n - 1). With n even the
/// center is a cell center, never a node.
class Grid2D {
 public:
  Grid2D(double half_width, int n, Vec2 center = {});

  double half_width() const { return half_width_; }
  int n() const { return n_; }
  Vec2 center() const { return center_; }
  double spacing() const { return 2.0 * half_width_ / (n_ - 1); }
  std::size_t size() const { return static_cast<std::size_t>(n_) * n_; }
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(i) * n_ + j; }

  double x(int i) const { return center_.x - half_width_ + i * spacing(); }
  double y(int j) const { return center_.y - half_width_ + j * spacing(); }
  Vec2 node(int i, int j) const { return {x(i), y(j)}; }

  bool contains(Vec2 p, double slack = 1e-12) const;
  bool same_geometry(const Grid2D& other) const;

 private:
  double half_width_;
  int n_;
  Vec2 center_;
};

/// Real nonnegative grid function (row-major, index i * n + j).
class Field2D {
 public:
  explicit Field2D(Grid2D grid);
  /// Throws std::invalid_argument on size mismatch or negative/non-finite data.
  Field2D(Grid2D grid, std::vector<double> data);

  /// Samples f at every node; the boundary ring is set to zero (Dirichlet).
  static Field2D from_function(const Grid2D& grid, const std::function<double(Vec2)>& f);

  const Grid2D& grid() const { return grid_; }
  std::span<const double> data() const { return data_; }
  double operator()(int i, int j) const { return data_[grid_.index(i, j)]; }
  double max() const;

  /// Trapezoidal integral of u^2.
  double mass() const;
  /// Copy scaled to unit mass; throws std::invalid_argument for a zero field.
  Field2D normalized() const;

 private:
  Grid2D grid_;
  std::vector<double> data_;
};

/// Finite-difference scheme. Each is realized as -Laplacian = sum_dims D^T D
/// for a one-sided difference filter D with zero extension past the boundary,
/// so the node-sum inner product satisfies <-Lap u, u> = |D u|^2 exactly.
enum class Stencil {
  /// D = forward difference; -Lap is the 5-point [-1, 2, -1] / h^2 stencil.
  second_order,
  /// D = 3-tap filter whose autocorrelation is [1, -16, 30, -16, 1] / (12 h^2).
  fourth_order,
};

/// Taps of the difference filter D for a stencil (scaled by 1 / h).
std::span<const double> difference_taps(Stencil stencil);

/// -Laplacian on interior nodes; boundary entries of `out` are zero and the
/// boundary values of `u` are treated as the Dirichlet data (expected zero).
void neg_laplacian(const Grid2D& grid, std::span<const double> u, Stencil stencil,
                   std::span<double> out);

/// Sum over all filter positions of |D_x u|^2 + |D_y u|^2 times h^2.
double gradient_energy(const Grid2D& grid, std::span<const double> u, Stencil stencil);

/// Trapezoidal integral of node values (exact for constants on the square).
double integrate(const Grid2D& grid, std::span<const double> f);
double integrate_product(const Grid2D& grid, std::span<const double> a,
                         std::span<const double> b);

/// Bilinear interpolation; throws std::out_of_range outside the grid.
double interpolate(const Field2D& field, Vec2 p);

}  // namespace gpc
