#include "gpc/minimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "gpc/dirichlet_poisson.hpp"
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

struct State {
  std::vector<double> u;
  std::vector<double> hu;
  std::vector<double> lap;
  double value = 0.0;
  double kinetic = 0.0;
  double potential = 0.0;
  double quartic_half = 0.0;  // (1/2) integral of u^4
  double mass = 0.0;
};

// Integrals <d, x>, <d, y>, <d, z> in one pass.
struct Triple {
  double x, y, z;
};

// Per-node scratch for the densities.
struct Scratch {
  std::vector<double> a, b;
  explicit Scratch(std::size_t n) : a(n), b(n) {}
};

// Changes are evaluated for the scale-invariant forms (the functional at
// u / |u|) from delta = to - from directly, using
// <A to, to> - <A from, from> = <A (to + from), delta> for symmetric A and
// the same identity for the mass. Every term then carries only relative
// rounding error, so descent stays decidable far below the rounding level
// of the totals and of the normalization itself.
class GpFunctional {
 public:
  GpFunctional(const Grid2D& grid, std::span<const double> v, double a, Stencil s)
      : grid_(grid), v_(v), a_(a), stencil_(s), scratch_(grid.size()), extra_(grid.size()) {}

  void evaluate(State& st) {
    neg_laplacian(grid_, st.u, stencil_, st.lap);
    for (std::size_t k = 0; k < st.u.size(); ++k) {
      const double u = st.u[k];
      const double cubic = a_ * u * u * u;
      st.hu[k] = st.lap[k] + v_[k] * u - cubic;
      scratch_.a[k] = u * st.lap[k];
      scratch_.b[k] = v_[k] * u * u;
      extra_[k] = u * u;
    }
    for (std::size_t k : boundary_) st.hu[k] = 0.0;
    st.kinetic = integrate(grid_, scratch_.a);
    st.potential = integrate(grid_, scratch_.b);
    st.mass = integrate(grid_, extra_);
    for (auto& v : extra_) v *= v;
    st.quartic_half = 0.5 * integrate(grid_, extra_);
    st.value = st.kinetic + st.potential - a_ * st.quartic_half;
  }

  double change(const State& from, const State& to) {
    for (std::size_t k = 0; k < to.u.size(); ++k) {
      const double d = to.u[k] - from.u[k];
      const double s = to.u[k] + from.u[k];
      scratch_.a[k] = d * (to.lap[k] + from.lap[k] + v_[k] * s);
      scratch_.b[k] = d * s * (to.u[k] * to.u[k] + from.u[k] * from.u[k]);
      extra_[k] = d * s;
    }
    const double d_quad = integrate(grid_, scratch_.a);
    const double d_quartic = integrate(grid_, scratch_.b);
    const double d_mass = integrate(grid_, extra_);
    const double mu = from.mass, mw = from.mass + d_mass;
    const double quad = from.kinetic + from.potential;
    const double quartic = 2.0 * from.quartic_half;
    return d_quad / mw - quad * d_mass / (mu * mw) -
           0.5 * a_ * (d_quartic / (mw * mw) - quartic * d_mass * (mw + mu) / (mu * mu * mw * mw));
  }

  void set_boundary(const std::vector<std::size_t>& idx) { boundary_ = idx; }

 private:
  const Grid2D& grid_;
  std::span<const double> v_;
  double a_;
  Stencil stencil_;
  Scratch scratch_;
  std::vector<double> extra_;
  std::vector<std::size_t> boundary_;
};

class QuotientFunctional {
 public:
  QuotientFunctional(const Grid2D& grid, Stencil s)
      : grid_(grid), stencil_(s), scratch_(grid.size()), extra_(grid.size()) {}

  void evaluate(State& st) {
    neg_laplacian(grid_, st.u, stencil_, st.lap);
    for (std::size_t k = 0; k < st.u.size(); ++k) {
      const double u = st.u[k];
      scratch_.a[k] = u * st.lap[k];
      scratch_.b[k] = u * u * u * u;
      extra_[k] = u * u;
    }
    st.kinetic = integrate(grid_, scratch_.a);
    st.quartic_half = 0.5 * integrate(grid_, scratch_.b);
    st.mass = integrate(grid_, extra_);
    if (!(st.quartic_half > 0.0)) throw NumericError("GN quotient: field vanished");
    st.value = st.kinetic * st.mass / st.quartic_half;
    const double ratio = st.kinetic / st.quartic_half;
    for (std::size_t k = 0; k < st.u.size(); ++k) {
      const double u = st.u[k];
      st.hu[k] = st.lap[k] - ratio * u * u * u;
    }
    for (std::size_t k : boundary_) st.hu[k] = 0.0;
  }

  double change(const State& from, const State& to) {
    for (std::size_t k = 0; k < to.u.size(); ++k) {
      const double d = to.u[k] - from.u[k];
      const double s = to.u[k] + from.u[k];
      scratch_.a[k] = d * (to.lap[k] + from.lap[k]);
      scratch_.b[k] = 0.5 * d * s * (to.u[k] * to.u[k] + from.u[k] * from.u[k]);
      extra_[k] = d * s;
    }
    const double dk = integrate(grid_, scratch_.a);
    const double dq = integrate(grid_, scratch_.b);
    const double dm = integrate(grid_, extra_);
    const double numerator = from.quartic_half * (dk * (from.mass + dm) + from.kinetic * dm) -
                             from.kinetic * from.mass * dq;
    return numerator / (from.quartic_half * (from.quartic_half + dq));
  }

  void set_boundary(const std::vector<std::size_t>& idx) { boundary_ = idx; }

 private:
  const Grid2D& grid_;
  Stencil stencil_;
  Scratch scratch_;
  std::vector<double> extra_;
  std::vector<std::size_t> boundary_;
};

std::vector<std::size_t> boundary_indices(const Grid2D& g) {
  std::vector<std::size_t> idx;
  const int n = g.n();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == 0 || j == 0 || i == n - 1 || j == n - 1) idx.push_back(g.index(i, j));
    }
  }
  return idx;
}

struct FlowOutcome {
  State state;
  double initial_value = 0.0;
  double mu = 0.0;
  double residual = 0.0;
  int iters = 0;
  int rejected = 0;
  bool converged = false;
  std::vector<IterationRecord> history;
  std::string diagnostics;
};

ResidualInfo residual_of(const Grid2D& g, const State& st, std::vector<double>& work) {
  ResidualInfo r;
  r.mu = integrate_product(g, st.hu, st.u);
  for (std::size_t k = 0; k < work.size(); ++k) work[k] = st.hu[k] - r.mu * st.u[k];
  r.residual = std::sqrt(integrate_product(g, work, work));
  return r;
}

template <class Functional>
FlowOutcome run_flow(const Grid2D& grid, Functional& f, std::vector<double> u0,
                     const SolveOptions& opts) {
  const auto boundary = boundary_indices(grid);
  f.set_boundary(boundary);
  const std::size_t size = grid.size();
  FlowOutcome out;
  State cur{std::move(u0), std::vector<double>(size), std::vector<double>(size)};
  State trial{std::vector<double>(size), std::vector<double>(size), std::vector<double>(size)};
  f.evaluate(cur);
  out.initial_value = cur.value;
  // Running value: initial value plus accurately computed changes.
  double running = cur.value;

  std::vector<double> work(size), dir(size);
  std::unique_ptr<DirichletPoisson> poisson;
  if (opts.preconditioner == Preconditioner::sobolev) {
    poisson = std::make_unique<DirichletPoisson>(grid, opts.stencil);
  }
  const double tau0 = default_tau(grid, opts);
  const double tau_floor = tau0 * 1e-12;
  double tau = tau0;
  int accepted_since_change = 0;
  const double floor_sigma = 1.0 / (grid.half_width() * grid.half_width());

  ResidualInfo res = residual_of(grid, cur, work);
  while (true) {
    if (res.residual <= opts.residual_tol) {
      out.converged = true;
      break;
    }
    if (out.iters >= opts.max_iters) {
      std::ostringstream msg;
      msg << "no convergence in " << opts.max_iters << " iterations (residual " << res.residual
          << ", tolerance " << opts.residual_tol << ")";
      out.diagnostics = msg.str();
      break;
    }
    if (poisson) {
      const double sigma = std::max({cur.kinetic, std::abs(res.mu), floor_sigma});
      poisson->tangent_direction(cur.hu, cur.u, sigma, dir);
    } else {
      std::copy(cur.hu.begin(), cur.hu.end(), dir.begin());
    }

    bool accepted = false;
    while (true) {
      for (std::size_t k = 0; k < size; ++k) trial.u[k] = std::abs(cur.u[k] - tau * dir[k]);
      for (std::size_t k : boundary) trial.u[k] = 0.0;
      const double m = integrate_product(grid, trial.u, trial.u);
      if (m > 0.0 && std::isfinite(m)) {
        const double s = 1.0 / std::sqrt(m);
        for (auto& v : trial.u) v *= s;
        f.evaluate(trial);
        const double delta = f.change(cur, trial);
        if (delta <= 0.0) {
          accepted = true;
          running += delta;
          if (opts.record_history) {
            out.history.push_back({running, res.residual, tau,
                                   integrate_product(grid, trial.u, trial.u)});
          }
          break;
        }
      }
      tau *= 0.5;
      ++out.rejected;
      accepted_since_change = 0;
      if (tau < tau_floor) break;
    }
    if (!accepted) {
      std::ostringstream msg;
      msg << "step size underflow after " << out.iters << " iterations (residual "
          << res.residual << ")";
      out.diagnostics = msg.str();
      break;
    }
    std::swap(cur, trial);
    ++out.iters;
    if (++accepted_since_change >= 10) {
      tau = std::min(2.0 * tau, tau0);
      accepted_since_change = 0;
    }
    res = residual_of(grid, cur, work);
  }
  out.mu = res.mu;
  out.residual = res.residual;
  out.state = std::move(cur);
  return out;
}

double astar_limit() { return default_townes().constants.astar; }

}  // namespace

void SolveOptions::validate() const {
  if (tau && !(*tau > 0.0)) throw std::invalid_argument("SolveOptions: tau must be positive");
  if (!(residual_tol > 0.0)) throw std::invalid_argument("SolveOptions: residual_tol must be positive");
  if (max_iters <= 0) throw std::invalid_argument("SolveOptions: max_iters must be positive");
  if (const auto* g = std::get_if<GaussianInit>(&init); g && !(g->width > 0.0)) {
    throw std::invalid_argument("SolveOptions: gaussian width must be positive");
  }
  if (const auto* t = std::get_if<TownesInit>(&init); t && !(t->scale > 0.0)) {
    throw std::invalid_argument("SolveOptions: townes scale must be positive");
  }
  if (const auto* f = std::get_if<FieldInit>(&init); f && !f->field) {
    throw std::invalid_argument("SolveOptions: field initialization without a field");
  }
}

std::vector<double> apply_hamiltonian(const Grid2D& grid, std::span<const double> potential,
                                      double a, Stencil stencil, std::span<const double> u) {
  std::vector<double> hu(grid.size());
  neg_laplacian(grid, u, stencil, hu);
  const int n = grid.n();
  for (int i = 1; i + 1 < n; ++i) {
    for (int j = 1; j + 1 < n; ++j) {
      const std::size_t k = grid.index(i, j);
      hu[k] += potential[k] * u[k] - a * u[k] * u[k] * u[k];
    }
  }
  return hu;
}

double discrete_energy(const Grid2D& grid, std::span<const double> potential, double a,
                       Stencil stencil, std::span<const double> u) {
  std::vector<double> lap(grid.size());
  neg_laplacian(grid, u, stencil, lap);
  std::vector<double> density(grid.size());
  for (std::size_t k = 0; k < density.size(); ++k) {
    density[k] = u[k] * (lap[k] + potential[k] * u[k] - 0.5 * a * u[k] * u[k] * u[k]);
  }
  return integrate(grid, density);
}

ResidualInfo euler_lagrange_residual(const Grid2D& grid, std::span<const double> potential,
                                     double a, Stencil stencil, std::span<const double> u) {
  const auto hu = apply_hamiltonian(grid, potential, a, stencil, u);
  ResidualInfo r;
  r.mu = integrate_product(grid, hu, u);
  std::vector<double> d(hu.size());
  for (std::size_t k = 0; k < d.size(); ++k) d[k] = hu[k] - r.mu * u[k];
  r.residual = std::sqrt(integrate_product(grid, d, d));
  return r;
}

Field2D initial_field(const Grid2D& grid, const Initialization& init) {
  Field2D f = std::visit(
      Overloaded{
          [&](const GaussianInit& g) {
            const double w2 = 2.0 * g.width * g.width;
            return Field2D::from_function(grid, [&](Vec2 x) {
              const Vec2 d = x - g.center;
              return std::exp(-(d.x * d.x + d.y * d.y) / w2);
            });
          },
          [&](const TownesInit& t) {
            const NormalizedProfile q0(default_townes().profile, default_townes().constants.mass);
            return Field2D::from_function(
                grid, [&](Vec2 x) { return t.scale * q0.value(t.scale * distance(x, t.center)); });
          },
          [&](const FieldInit& fi) {
            const Field2D& src = *fi.field;
            return Field2D::from_function(grid, [&](Vec2 x) {
              return src.grid().contains(x) ? interpolate(src, x) : 0.0;
            });
          },
      },
      init);
  return f.normalized();
}

double default_tau(const Grid2D& grid, const SolveOptions& opts) {
  if (opts.tau) return *opts.tau;
  if (opts.preconditioner == Preconditioner::sobolev) return 1.0;
  const double h2 = grid.spacing() * grid.spacing();
  return (opts.stencil == Stencil::second_order ? 0.25 : 0.15) * h2;
}

MinimizationResult minimize_sampled(const Grid2D& grid, std::span<const double> potential,
                                    double a, const SolveOptions& opts) {
  opts.validate();
  if (!(a >= 0.0)) throw std::invalid_argument("minimize: a must be nonnegative");
  const double astar = astar_limit();
  if (a >= astar) {
    std::ostringstream msg;
    msg << "minimize: a = " << a << " is not below a* = " << astar
        << "; the energy is unbounded below";
    throw HypothesisError(msg.str());
  }
  if (potential.size() != grid.size()) {
    throw std::invalid_argument("minimize: potential size does not match the grid");
  }
  const Field2D start = opts.continuation ? initial_field(grid, FieldInit{opts.continuation})
                                          : initial_field(grid, opts.init);
  GpFunctional f(grid, potential, a, opts.stencil);
  FlowOutcome flow = run_flow(grid, f, std::vector<double>(start.data().begin(), start.data().end()),
                              opts);
  Field2D u(grid, std::move(flow.state.u));
  EnergyBreakdown energy = energy_breakdown(u, potential, a, opts.stencil);
  MinimizationResult r{std::move(u), energy, flow.mu, flow.residual, flow.iters, flow.converged,
                       flow.initial_value, flow.rejected, std::move(flow.history),
                       std::move(flow.diagnostics)};
  return r;
}

MinimizationResult minimize(const Grid2D& grid, const PotentialSpec& spec, double a,
                            const SolveOptions& opts) {
  return minimize_sampled(grid, sample_potential(spec, grid, opts.sampling), a, opts);
}

QuotientResult minimize_gn_quotient(const Grid2D& grid, const SolveOptions& opts) {
  opts.validate();
  const Field2D start = opts.continuation ? initial_field(grid, FieldInit{opts.continuation})
                                          : initial_field(grid, opts.init);
  QuotientFunctional f(grid, opts.stencil);
  FlowOutcome flow = run_flow(grid, f, std::vector<double>(start.data().begin(), start.data().end()),
                              opts);
  const double ratio = flow.state.value;
  return QuotientResult{Field2D(grid, std::move(flow.state.u)), ratio, flow.residual, flow.iters,
                        flow.converged, std::move(flow.history)};
}

}  // namespace gpc
