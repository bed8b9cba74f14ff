#include "gpc/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "gpc/errors.hpp"
#include "gpc/quadrature.hpp"

namespace gpc {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// integral over [0, S] of cosh(s)^(1 - p)
double cosh_power_integral(double upper, double p) {
  if (upper == 0.0) return 0.0;
  const double e = 1.0 - p;
  return gauss_legendre<20>([e](double s) { return std::pow(std::cosh(s), e); }, 0.0, upper);
}

// Integral of |x|^(-p) over [0, a] x [0, b], a, b >= 0.
double corner_integral(double a, double b, double p) {
  if (a == 0.0 || b == 0.0) return 0.0;
  if (p == 1.0) return a * std::asinh(b / a) + b * std::asinh(a / b);
  const double gap = 2.0 - p;
  return (std::pow(a, gap) * cosh_power_integral(std::asinh(b / a), p) +
          std::pow(b, gap) * cosh_power_integral(std::asinh(a / b), p)) /
         gap;
}

double signed_corner(double x, double y, double p) {
  const double s = (x < 0 ? -1.0 : 1.0) * (y < 0 ? -1.0 : 1.0);
  return s * corner_integral(std::abs(x), std::abs(y), p);
}

double table_value(const Field2D& table, Vec2 x) {
  const Grid2D& g = table.grid();
  const Vec2 c = g.center();
  const double L = g.half_width();
  const Vec2 clamped{std::clamp(x.x, c.x - L, c.x + L), std::clamp(x.y, c.y - L, c.y + L)};
  return interpolate(table, clamped);
}

}  // namespace

PotentialSpec::PotentialSpec(Background background, std::vector<SingularPoint> points,
                             std::optional<double> reg_delta)
    : background_(std::move(background)), points_(std::move(points)), reg_delta_(reg_delta) {
  if (const auto* tab = std::get_if<TabulatedBackground>(&background_); tab && !tab->table) {
    throw std::invalid_argument("PotentialSpec: tabulated background without a table");
  }
  for (std::size_t j = 0; j < points_.size(); ++j) {
    const SingularPoint& s = points_[j];
    if (!(s.p > 0.0 && s.p < 2.0)) {
      std::ostringstream msg;
      msg << "PotentialSpec: point " << j << " has p = " << s.p << " outside (0, 2)";
      throw std::invalid_argument(msg.str());
    }
    if (!std::isfinite(s.h) || !std::isfinite(s.x.x) || !std::isfinite(s.x.y)) {
      throw std::invalid_argument("PotentialSpec: non-finite point data");
    }
    for (std::size_t k = 0; k < j; ++k) {
      if (points_[k].x == s.x) {
        std::ostringstream msg;
        msg << "PotentialSpec: points " << k << " and " << j << " coincide";
        throw std::invalid_argument(msg.str());
      }
    }
  }
  if (reg_delta_ && !(*reg_delta_ >= 0.0)) {
    throw std::invalid_argument("PotentialSpec: reg_delta must be nonnegative");
  }
}

double PotentialSpec::background_at(Vec2 x) const {
  return std::visit(Overloaded{
                        [](const ZeroBackground&) { return 0.0; },
                        [x](const HarmonicBackground& h) {
                          const Vec2 d = x - h.center;
                          return h.omega * h.omega * (d.x * d.x + d.y * d.y);
                        },
                        [x](const TabulatedBackground& t) { return table_value(*t.table, x); },
                    },
                    background_);
}

double PotentialSpec::min_separation() const {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < points_.size(); ++j) {
    for (std::size_t k = 0; k < j; ++k) best = std::min(best, distance(points_[j].x, points_[k].x));
  }
  return best;
}

PotentialSpec PotentialSpec::translated(Vec2 shift) const {
  Background bg = std::visit(
      Overloaded{
          [](const ZeroBackground& z) -> Background { return z; },
          [shift](HarmonicBackground h) -> Background {
            h.center = h.center + shift;
            return h;
          },
          [shift](const TabulatedBackground& t) -> Background {
            const Grid2D& g = t.table->grid();
            Grid2D moved(g.half_width(), g.n(), g.center() + shift);
            return TabulatedBackground{std::make_shared<const Field2D>(
                moved, std::vector<double>(t.table->data().begin(), t.table->data().end()))};
          },
      },
      background_);
  std::vector<SingularPoint> pts = points_;
  for (auto& s : pts) s.x = s.x + shift;
  return PotentialSpec(std::move(bg), std::move(pts), reg_delta_);
}

PotentialSpec PotentialSpec::with_points(std::vector<SingularPoint> points) const {
  return PotentialSpec(background_, std::move(points), reg_delta_);
}

double evaluate(const PotentialSpec& spec, Vec2 x) {
  const double floor = spec.reg_delta().value_or(0.0);
  double v = spec.background_at(x);
  for (const SingularPoint& s : spec.points()) {
    const double d = std::max(distance(x, s.x), floor);
    if (d == 0.0) throw std::domain_error("evaluate: singular point hit with reg_delta = 0");
    v += s.h * std::pow(d, -s.p);
  }
  return v;
}

SelectionData classify(const PotentialSpec& spec) {
  const auto& pts = spec.points();
  double p = -1.0;
  for (const auto& s : pts) {
    if (s.h < 0.0) p = std::max(p, s.p);
  }
  if (p < 0.0) {
    throw HypothesisError("classify: no singular point with h(x_j) < 0; collapse analysis does not apply");
  }
  double hmin = std::numeric_limits<double>::infinity();
  for (const auto& s : pts) {
    if (s.p == p) hmin = std::min(hmin, s.h);
  }
  SelectionData out;
  out.p = p;
  out.h0 = -hmin;
  for (std::size_t j = 0; j < pts.size(); ++j) {
    if (pts[j].p == p && pts[j].h == hmin) out.candidates.push_back(j);
  }
  return out;
}

std::vector<std::size_t> negative_wells(const PotentialSpec& spec) {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < spec.points().size(); ++j) {
    if (spec.points()[j].h < 0.0) out.push_back(j);
  }
  return out;
}

double rectangle_integral(double x0, double x1, double y0, double y1, double p) {
  return signed_corner(x1, y1, p) - signed_corner(x0, y1, p) - signed_corner(x1, y0, p) +
         signed_corner(x0, y0, p);
}

std::vector<double> sample_potential(const PotentialSpec& spec, const Grid2D& grid,
                                     PotentialSampling mode) {
  const int n = grid.n();
  const double h = grid.spacing();
  std::vector<double> v(grid.size());
  if (mode == PotentialSampling::point) {
    const double floor = spec.reg_delta().value_or(0.5 * h);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const Vec2 x = grid.node(i, j);
        double val = spec.background_at(x);
        for (const SingularPoint& s : spec.points()) {
          val += s.h * std::pow(std::max(distance(x, s.x), floor), -s.p);
        }
        v[grid.index(i, j)] = val;
      }
    }
    return v;
  }

  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) v[grid.index(i, j)] = spec.background_at(grid.node(i, j));
  }
  const int nc = n + 1;
  std::vector<double> corners(static_cast<std::size_t>(nc) * nc);
  std::vector<double> avg(grid.size());
  const double inv_area = 1.0 / (h * h);
  for (const SingularPoint& s : spec.points()) {
    // Control-volume corners sit half a spacing off the nodes.
    for (int a = 0; a < nc; ++a) {
      const double cx = grid.x(0) - 0.5 * h + a * h - s.x.x;
      for (int b = 0; b < nc; ++b) {
        const double cy = grid.y(0) - 0.5 * h + b * h - s.x.y;
        corners[static_cast<std::size_t>(a) * nc + b] = signed_corner(cx, cy, s.p);
      }
    }
    auto corner = [&](int a, int b) { return corners[static_cast<std::size_t>(a) * nc + b]; };
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        avg[grid.index(i, j)] =
            (corner(i + 1, j + 1) - corner(i, j + 1) - corner(i + 1, j) + corner(i, j)) * inv_area;
      }
    }
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        double val = avg[grid.index(i, j)];
        if (i > 0 && j > 0 && i + 1 < n && j + 1 < n) {
          const double lap = avg[grid.index(i + 1, j)] + avg[grid.index(i - 1, j)] +
                             avg[grid.index(i, j + 1)] + avg[grid.index(i, j - 1)] - 4.0 * val;
          val -= lap / 24.0;
        }
        v[grid.index(i, j)] += s.h * val;
      }
    }
  }
  return v;
}

}  // namespace gpc
