#pragma once

#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "gpc/grid.hpp"
#include "gpc/vec2.hpp"

namespace gpc {

struct ZeroBackground {};

/// g(x) = omega^2 |x - center|^2.
struct HarmonicBackground {
  double omega = 1.0;
  Vec2 center{};
};

/// Nonnegative values on a grid, bilinearly interpolated and clamped to the
/// table edge outside it.
struct TabulatedBackground {
  std::shared_ptr<const Field2D> table;
};

using Background = std::variant<ZeroBackground, HarmonicBackground, TabulatedBackground>;

/// One term h |x - x_j|^(-p) of the singular part.
struct SingularPoint {
  Vec2 x;
  double p = 1.0;
  double h = -1.0;
};

/// V(x) = g(x) + sum_j h_j |x - x_j|^(-p_j), with h locally constant at each
/// singularity. Immutable after construction.
class PotentialSpec {
 public:
  PotentialSpec() = default;
  /// Throws std::invalid_argument for p_j outside (0, 2), coincident points,
  /// negative reg_delta, or a background that is negative somewhere.
  PotentialSpec(Background background, std::vector<SingularPoint> points,
                std::optional<double> reg_delta = std::nullopt);

  const Background& background() const { return background_; }
  const std::vector<SingularPoint>& points() const { return points_; }
  /// Distance floor for pointwise evaluation; unset means "half the grid
  /// spacing" when sampling on a grid and 0 for evaluate().
  std::optional<double> reg_delta() const { return reg_delta_; }

  double background_at(Vec2 x) const;
  /// Smallest pairwise distance between singular points (infinity if < 2).
  double min_separation() const;
  PotentialSpec translated(Vec2 shift) const;
  PotentialSpec with_points(std::vector<SingularPoint> points) const;

 private:
  Background background_{ZeroBackground{}};
  std::vector<SingularPoint> points_;
  std::optional<double> reg_delta_;
};

/// g(x) + sum_j h_j max(|x - x_j|, reg_delta)^(-p_j). Throws
/// std::domain_error when x hits a singular point with reg_delta = 0.
double evaluate(const PotentialSpec& spec, Vec2 x);

struct SelectionData {
  double p = 0.0;
  double h0 = 0.0;
  std::vector<std::size_t> candidates;
};

/// p = max{p_j : h_j < 0}, h0 = -min{h_j : p_j = p}, and every j attaining
/// both. Throws gpc::HypothesisError when no h_j is negative.
SelectionData classify(const PotentialSpec& spec);

/// Indices j with h_j < 0.
std::vector<std::size_t> negative_wells(const PotentialSpec& spec);

enum class PotentialSampling {
  /// evaluate() at each node with the distance floor (default h / 2).
  point,
  /// Exact average of each |x - x_j|^(-p_j) over the node's control volume,
  /// corrected by -(h^2 / 24) times its 5-point Laplacian so that node sums
  /// of V f are accurate to O(h^3) near the singularity.
  cell_average,
};

/// Potential values at every node of `grid` (row-major, same layout as Field2D).
std::vector<double> sample_potential(const PotentialSpec& spec, const Grid2D& grid,
                                     PotentialSampling mode = PotentialSampling::cell_average);

/// Exact integral of |x|^(-p) over the axis-aligned rectangle [x0,x1] x [y0,y1].
double rectangle_integral(double x0, double x1, double y0, double y1, double p);

}  // namespace gpc
