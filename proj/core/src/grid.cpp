#include "gpc/grid.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "gpc/quadrature.hpp"

namespace gpc {
namespace {

// Fourth-order filter [alpha, -(alpha + beta), beta] / sqrt(6) with
// alpha^2 + beta^2 = 7 and 2 alpha beta = 1.
const double kAlpha = (std::sqrt(8.0) + std::sqrt(6.0)) / 2.0;
const double kBeta = (std::sqrt(8.0) - std::sqrt(6.0)) / 2.0;
const std::array<double, 2> kForwardTaps{-1.0, 1.0};
const std::array<double, 3> kFourthTaps{kAlpha / std::sqrt(6.0), -(kAlpha + kBeta) / std::sqrt(6.0),
                                        kBeta / std::sqrt(6.0)};

// Symmetric -d^2/dx^2 stencil (offsets 0..K) in units of 1 / h^2.
const std::array<double, 2> kSecondLap{2.0, -1.0};
const std::array<double, 3> kFourthLap{5.0 / 2.0, -4.0 / 3.0, 1.0 / 12.0};

}  // namespace

Grid2D::Grid2D(double half_width, int n, Vec2 center)
    : half_width_(half_width), n_(n), center_(center) {
  if (n < 16) throw std::invalid_argument("Grid2D: need at least 16 nodes per side");
  if (!(half_width > 0.0) || !std::isfinite(half_width)) {
    throw std::invalid_argument("Grid2D: half width must be positive and finite");
  }
}

bool Grid2D::contains(Vec2 p, double slack) const {
  const double tol = slack * std::max(1.0, half_width_);
  return std::abs(p.x - center_.x) <= half_width_ + tol &&
         std::abs(p.y - center_.y) <= half_width_ + tol;
}

bool Grid2D::same_geometry(const Grid2D& other) const {
  const double tol = 1e-12 * std::max(1.0, half_width_);
  return n_ == other.n_ && std::abs(half_width_ - other.half_width_) <= tol &&
         std::abs(center_.x - other.center_.x) <= tol &&
         std::abs(center_.y - other.center_.y) <= tol;
}

Field2D::Field2D(Grid2D grid) : grid_(grid), data_(grid.size(), 0.0) {}

Field2D::Field2D(Grid2D grid, std::vector<double> data) : grid_(grid), data_(std::move(data)) {
  if (data_.size() != grid_.size()) {
    std::ostringstream msg;
    msg << "Field2D: expected " << grid_.size() << " values, got " << data_.size();
    throw std::invalid_argument(msg.str());
  }
  for (double v : data_) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument("Field2D: values must be finite and nonnegative");
    }
  }
}

Field2D Field2D::from_function(const Grid2D& grid, const std::function<double(Vec2)>& f) {
  const int n = grid.n();
  std::vector<double> data(grid.size(), 0.0);
  for (int i = 1; i + 1 < n; ++i) {
    for (int j = 1; j + 1 < n; ++j) data[grid.index(i, j)] = f(grid.node(i, j));
  }
  return Field2D(grid, std::move(data));
}

double Field2D::max() const { return *std::max_element(data_.begin(), data_.end()); }

double Field2D::mass() const { return integrate_product(grid_, data_, data_); }

Field2D Field2D::normalized() const {
  const double m = mass();
  if (!(m > 0.0)) throw std::invalid_argument("Field2D::normalized: zero field");
  const double s = 1.0 / std::sqrt(m);
  std::vector<double> d(data_);
  for (auto& v : d) v *= s;
  return Field2D(grid_, std::move(d));
}

std::span<const double> difference_taps(Stencil stencil) {
  if (stencil == Stencil::second_order) return kForwardTaps;
  return kFourthTaps;
}

void neg_laplacian(const Grid2D& grid, std::span<const double> u, Stencil stencil,
                   std::span<double> out) {
  const int n = grid.n();
  const double inv_h2 = 1.0 / (grid.spacing() * grid.spacing());
  const std::span<const double> lap =
      stencil == Stencil::second_order ? std::span<const double>(kSecondLap)
                                       : std::span<const double>(kFourthLap);
  const int reach = static_cast<int>(lap.size()) - 1;
  std::fill(out.begin(), out.end(), 0.0);
  for (int i = 1; i + 1 < n; ++i) {
    const double* row = u.data() + static_cast<std::size_t>(i) * n;
    double* dst = out.data() + static_cast<std::size_t>(i) * n;
    for (int j = 1; j + 1 < n; ++j) {
      double acc = 2.0 * lap[0] * row[j];
      for (int k = 1; k <= reach; ++k) {
        double nb = 0.0;
        if (i - k >= 0) nb += u[static_cast<std::size_t>(i - k) * n + j];
        if (i + k < n) nb += u[static_cast<std::size_t>(i + k) * n + j];
        if (j - k >= 0) nb += row[j - k];
        if (j + k < n) nb += row[j + k];
        acc += lap[k] * nb;
      }
      dst[j] = acc * inv_h2;
    }
  }
}

double gradient_energy(const Grid2D& grid, std::span<const double> u, Stencil stencil) {
  const int n = grid.n();
  const std::span<const double> taps = difference_taps(stencil);
  const int width = static_cast<int>(taps.size());
  auto at = [&](int i, int j) -> double {
    if (i < 0 || j < 0 || i >= n || j >= n) return 0.0;
    return u[static_cast<std::size_t>(i) * n + j];
  };
  // Filter positions m run from -(width - 1) to n - 1 along each axis.
  const int positions = n + width - 1;
  const double sum = pairwise_reduce(0, static_cast<std::size_t>(positions) * n, [&](std::size_t k) {
    const int m = static_cast<int>(k / n) - (width - 1);
    const int line = static_cast<int>(k % n);
    double dx = 0.0, dy = 0.0;
    for (int t = 0; t < width; ++t) {
      dx += taps[t] * at(m + t, line);
      dy += taps[t] * at(line, m + t);
    }
    return dx * dx + dy * dy;
  });
  // h^2 quadrature weight times (1/h)^2 from the taps.
  return sum;
}

double integrate(const Grid2D& grid, std::span<const double> f) {
  const std::size_t n = static_cast<std::size_t>(grid.n());
  const double h = grid.spacing();
  auto weight = [n](std::size_t k) { return (k == 0 || k + 1 == n) ? 0.5 : 1.0; };
  return h * h * pairwise_reduce(0, n, [&](std::size_t i) {
    return weight(i) * pairwise_reduce(0, n, [&](std::size_t j) { return weight(j) * f[i * n + j]; });
  });
}

double integrate_product(const Grid2D& grid, std::span<const double> a,
                         std::span<const double> b) {
  const std::size_t n = static_cast<std::size_t>(grid.n());
  const double h = grid.spacing();
  auto weight = [n](std::size_t k) { return (k == 0 || k + 1 == n) ? 0.5 : 1.0; };
  return h * h * pairwise_reduce(0, n, [&](std::size_t i) {
    return weight(i) * pairwise_reduce(0, n, [&](std::size_t j) {
      return weight(j) * a[i * n + j] * b[i * n + j];
    });
  });
}

double interpolate(const Field2D& field, Vec2 p) {
  const Grid2D& g = field.grid();
  if (!g.contains(p)) throw std::out_of_range("interpolate: point outside the grid");
  const double h = g.spacing();
  const int n = g.n();
  const double tx = std::clamp((p.x - g.x(0)) / h, 0.0, static_cast<double>(n - 1));
  const double ty = std::clamp((p.y - g.y(0)) / h, 0.0, static_cast<double>(n - 1));
  const int i = std::min(static_cast<int>(tx), n - 2);
  const int j = std::min(static_cast<int>(ty), n - 2);
  const double fx = tx - i, fy = ty - j;
  return (1 - fx) * (1 - fy) * field(i, j) + fx * (1 - fy) * field(i + 1, j) +
         (1 - fx) * fy * field(i, j + 1) + fx * fy * field(i + 1, j + 1);
}

}  // namespace gpc
