#include "gpc/radial.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "gpc/errors.hpp"
#include "gpc/quadrature.hpp"

namespace gpc {
namespace {

using State = std::array<double, 2>;  // (Q, Q')

constexpr double kTwoPi = 2.0 * std::numbers::pi;
// Below this radius the series expansion replaces integration.
constexpr double kSeriesRadius = 1e-2;
constexpr double kMatchRadius = 3.0;
constexpr double kStepTol = 1e-13;

State rhs(double r, const State& y) {
  return {y[1], -y[1] / r + y[0] - y[0] * y[0] * y[0]};
}

// Q = sum_k c_k r^(2k) near the origin; matching powers in
// Q'' + Q'/r = Q - Q^3 gives (2k + 2)^2 c_(k+1) = [Q - Q^3]_k.
State series(double q0, double r) {
  constexpr int kTerms = 8;
  std::array<double, kTerms> c{}, sq{}, cube{};
  c[0] = q0;
  for (int k = 0; k + 1 < kTerms; ++k) {
    sq[k] = 0.0;
    for (int i = 0; i <= k; ++i) sq[k] += c[i] * c[k - i];
    cube[k] = 0.0;
    for (int i = 0; i <= k; ++i) cube[k] += sq[i] * c[k - i];
    c[k + 1] = (c[k] - cube[k]) / ((2.0 * k + 2.0) * (2.0 * k + 2.0));
  }
  const double r2 = r * r;
  double q = 0.0, dq = 0.0;
  for (int k = kTerms - 1; k >= 0; --k) {
    q = q * r2 + c[k];
    if (k > 0) dq = dq * r2 + 2.0 * k * c[k];
  }
  return {q, dq * r};
}

// One Dormand-Prince 5(4) step; returns the 5th-order solution and writes the
// embedded error estimate.
State dopri_step(double r, const State& y, double h, double& err) {
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                   a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                   a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                   b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                   e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  auto axpy = [&](std::initializer_list<std::pair<double, const State*>> terms) {
    State out = y;
    for (auto [c, k] : terms) {
      out[0] += h * c * (*k)[0];
      out[1] += h * c * (*k)[1];
    }
    return out;
  };
  const State k1 = rhs(r, y);
  const State k2 = rhs(r + c2 * h, axpy({{a21, &k1}}));
  const State k3 = rhs(r + c3 * h, axpy({{a31, &k1}, {a32, &k2}}));
  const State k4 = rhs(r + c4 * h, axpy({{a41, &k1}, {a42, &k2}, {a43, &k3}}));
  const State k5 =
      rhs(r + c5 * h, axpy({{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
  const State k6 = rhs(r + h, axpy({{a61, &k1}, {a62, &k2}, {a63, &k3},
                                    {a64, &k4}, {a65, &k5}}));
  const State y5 =
      axpy({{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
  const State k7 = rhs(r + h, y5);
  // Relative to the state magnitude: the decaying tail reaches ~1e-13.
  const double magnitude = std::max({std::abs(y[0]), std::abs(y[1]), std::abs(y5[0]),
                                     std::abs(y5[1]), 1e-300});
  err = 0.0;
  for (int i = 0; i < 2; ++i) {
    const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                          e6 * k6[i] + e7 * k7[i]);
    err = std::max(err, std::abs(e) / (kStepTol * magnitude));
  }
  return y5;
}

// Adaptive integration from r0 to r1 (either direction). `on_step` is called
// after every accepted step and may return false to stop early.
template <class OnStep>
State integrate(State y, double r0, double r1, OnStep&& on_step) {
  const double span = r1 - r0;
  if (span == 0.0) return y;
  const double dir = span > 0 ? 1.0 : -1.0;
  double h = dir * std::min(std::abs(span), 1e-2);
  double r = r0;
  for (int guard = 0; guard < 10'000'000; ++guard) {
    if (dir * (r + h - r1) > 0) h = r1 - r;
    double err = 0.0;
    const State next = dopri_step(r, y, h, err);
    if (err <= 1.0) {
      r = (std::abs(r1 - (r + h)) < 1e-15 * std::max(1.0, std::abs(r1))) ? r1 : r + h;
      y = next;
      if (!on_step(r, y) || r == r1) return y;
    }
    const double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
    h *= factor;
    if (std::abs(h) < 1e-14) throw NumericError("radial integrator step underflow");
  }
  throw NumericError("radial integrator exceeded step budget");
}

State integrate(State y, double r0, double r1) {
  return integrate(y, r0, r1, [](double, const State&) { return true; });
}

double k0(double r) { return std::cyl_bessel_k(0.0, r); }
double k1(double r) { return std::cyl_bessel_k(1.0, r); }

// Decaying linear solution c K0(r) used to start the inward integration.
State tail_state(double c, double r) { return {c * k0(r), -c * k1(r)}; }

State outward_to(double q0, double r) {
  if (r <= kSeriesRadius) return series(q0, r);
  return integrate(series(q0, kSeriesRadius), kSeriesRadius, r);
}

std::vector<double> graded_mesh(double rmax, int intervals) {
  std::vector<double> mesh(static_cast<std::size_t>(intervals) + 1);
  for (int k = 0; k <= intervals; ++k) {
    mesh[k] = rmax * std::pow(static_cast<double>(k) / intervals, 1.5);
  }
  mesh.back() = rmax;
  return mesh;
}

struct Matched {
  double q0;
  double amplitude;
};

// Newton on (q0, c) so the outward and inward solutions meet at the match
// radius with equal value and slope.
Matched match_two_sided(double q0, double rmax, double rmatch) {
  auto mismatch = [&](double q, double c) {
    const State out = outward_to(q, rmatch);
    const State in = integrate(tail_state(c, rmax), rmax, rmatch);
    return State{out[0] - in[0], out[1] - in[1]};
  };
  // Amplitude guess from the outward shot evaluated at the match radius.
  double c = outward_to(q0, rmatch)[0] / k0(rmatch);
  for (int it = 0; it < 30; ++it) {
    const State f = mismatch(q0, c);
    if (std::max(std::abs(f[0]), std::abs(f[1])) < 1e-14) return {q0, c};
    const double dq = 1e-7 * q0;
    const double dc = 1e-7 * c;
    const State fq = mismatch(q0 + dq, c);
    const State fc = mismatch(q0, c + dc);
    const double j00 = (fq[0] - f[0]) / dq, j01 = (fc[0] - f[0]) / dc;
    const double j10 = (fq[1] - f[1]) / dq, j11 = (fc[1] - f[1]) / dc;
    const double det = j00 * j11 - j01 * j10;
    if (det == 0.0) break;
    const double step_q = (f[0] * j11 - f[1] * j01) / det;
    const double step_c = (j00 * f[1] - j10 * f[0]) / det;
    q0 -= step_q;
    c -= step_c;
    if (std::abs(step_q) < 1e-15 * q0 && std::abs(step_c) < 1e-15 * c) return {q0, c};
  }
  const State f = mismatch(q0, c);
  if (std::max(std::abs(f[0]), std::abs(f[1])) < 1e-11) return {q0, c};
  throw NumericError("two-sided matching of the radial profile did not converge");
}

std::optional<RadialProfile> build_profile(double q0_guess, double rmax, int intervals) {
  const std::vector<double> mesh = graded_mesh(rmax, intervals);
  // Snap the match radius onto the mesh.
  const auto it = std::lower_bound(mesh.begin(), mesh.end(), kMatchRadius);
  const std::size_t m = static_cast<std::size_t>(it - mesh.begin());
  const double rmatch = mesh[m];
  const Matched matched = match_two_sided(q0_guess, rmax, rmatch);

  std::vector<double> values(mesh.size()), derivs(mesh.size());
  values[0] = matched.q0;
  derivs[0] = 0.0;
  std::size_t k = 1;
  for (; k <= m && mesh[k] <= kSeriesRadius; ++k) {
    const State s = series(matched.q0, mesh[k]);
    values[k] = s[0];
    derivs[k] = s[1];
  }
  State y = series(matched.q0, kSeriesRadius);
  double r = kSeriesRadius;
  for (; k <= m; ++k) {
    y = integrate(y, r, mesh[k]);
    r = mesh[k];
    values[k] = y[0];
    derivs[k] = y[1];
  }
  y = tail_state(matched.amplitude, rmax);
  if (!(y[0] < 1e-10 * matched.q0)) return std::nullopt;
  values.back() = y[0];
  derivs.back() = y[1];
  r = rmax;
  for (std::size_t j = mesh.size() - 2; j > m; --j) {
    y = integrate(y, r, mesh[j]);
    r = mesh[j];
    values[j] = y[0];
    derivs[j] = y[1];
  }
  return RadialProfile(mesh, std::move(values), std::move(derivs));
}

}  // namespace

RadialProfile::RadialProfile(std::vector<double> nodes, std::vector<double> values,
                             std::vector<double> derivs)
    : nodes_(std::move(nodes)), values_(std::move(values)), derivs_(std::move(derivs)) {
  if (nodes_.size() < 3 || values_.size() != nodes_.size() ||
      derivs_.size() != nodes_.size()) {
    throw std::invalid_argument("RadialProfile: mismatched or too short arrays");
  }
  if (nodes_.front() != 0.0) throw std::invalid_argument("RadialProfile: nodes must start at r = 0");
  if (derivs_.front() != 0.0) throw std::invalid_argument("RadialProfile: Q'(0) must vanish");
  if (!(values_.front() > 0.0)) throw std::invalid_argument("RadialProfile: Q(0) must be positive");
  for (std::size_t i = 1; i < nodes_.size(); ++i) {
    if (!(nodes_[i] > nodes_[i - 1])) {
      throw std::invalid_argument("RadialProfile: nodes must be strictly increasing");
    }
    if (!(values_[i] < values_[i - 1]) || !(values_[i] > 0.0)) {
      std::ostringstream msg;
      msg << "RadialProfile: values must be positive and strictly decreasing (node " << i
          << ", r = " << nodes_[i] << ")";
      throw std::invalid_argument(msg.str());
    }
  }
  if (!(values_.back() < 1e-10 * values_.front())) {
    throw std::invalid_argument("RadialProfile: far-field decay not reached at rmax");
  }
}

std::size_t RadialProfile::interval(double r) const {
  const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), r);
  const auto idx = static_cast<std::size_t>(it - nodes_.begin());
  return std::clamp<std::size_t>(idx, 1, nodes_.size() - 1) - 1;
}

double RadialProfile::value(double r) const {
  r = std::abs(r);
  if (r >= rmax()) return values_.back() * k0(r) / k0(rmax());
  const std::size_t i = interval(r);
  const double h = nodes_[i + 1] - nodes_[i];
  const double t = (r - nodes_[i]) / h;
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * values_[i] + (t3 - 2 * t2 + t) * h * derivs_[i] +
         (-2 * t3 + 3 * t2) * values_[i + 1] + (t3 - t2) * h * derivs_[i + 1];
}

double RadialProfile::derivative(double r) const {
  const double sign = r < 0 ? -1.0 : 1.0;
  r = std::abs(r);
  if (r >= rmax()) return -sign * values_.back() * k1(r) / k0(rmax());
  const std::size_t i = interval(r);
  const double h = nodes_[i + 1] - nodes_[i];
  const double t = (r - nodes_[i]) / h;
  const double t2 = t * t;
  const double d = ((6 * t2 - 6 * t) * values_[i] + (-6 * t2 + 6 * t) * values_[i + 1]) / h +
                   (3 * t2 - 4 * t + 1) * derivs_[i] + (3 * t2 - 2 * t) * derivs_[i + 1];
  return sign * d;
}

RadialProfile RadialProfile::scaled(double c) const {
  std::vector<double> v(values_), d(derivs_);
  for (auto& x : v) x *= c;
  for (auto& x : d) x *= c;
  return RadialProfile(nodes_, std::move(v), std::move(d));
}

ShotOutcome classify_shot(double q0, double rmax) {
  if (!(q0 > 0.0)) throw std::invalid_argument("classify_shot: q0 must be positive");
  std::optional<ShotOutcome> outcome;
  const State end = integrate(series(q0, kSeriesRadius), kSeriesRadius, rmax,
                              [&](double, const State& y) {
                                if (y[0] <= 0.0) {
                                  outcome = ShotOutcome::undershoot;
                                } else if (y[1] >= 0.0) {
                                  outcome = ShotOutcome::overshoot;
                                }
                                return !outcome.has_value();
                              });
  if (outcome) return *outcome;
  // Neither event before rmax: the sign of the growing mode e^r decides.
  return end[0] + end[1] > 0.0 ? ShotOutcome::overshoot : ShotOutcome::undershoot;
}

RadialProfile solve_townes(const TownesOptions& options) {
  const auto [lo_in, hi_in] = options.bracket;
  if (!(lo_in > 0.0) || !(hi_in > lo_in)) {
    throw std::invalid_argument("solve_townes: bracket must satisfy 0 < lo < hi");
  }
  if (!(options.rmax >= 20.0)) throw std::invalid_argument("solve_townes: rmax must be >= 20");
  if (!(options.tol > 0.0)) throw std::invalid_argument("solve_townes: tol must be positive");
  if (options.mesh_intervals < 16) throw std::invalid_argument("solve_townes: mesh too coarse");

  double lo = lo_in, hi = hi_in;
  const ShotOutcome at_lo = classify_shot(lo);
  const ShotOutcome at_hi = classify_shot(hi);
  if (at_lo == at_hi) {
    std::ostringstream msg;
    msg << "solve_townes: bracket [" << lo << ", " << hi << "] does not straddle the ground state ("
        << (at_lo == ShotOutcome::undershoot ? "both undershoot" : "both overshoot") << ")";
    throw std::invalid_argument(msg.str());
  }
  int steps = 0;
  while (hi - lo >= options.tol) {
    if (steps++ >= options.max_bisections) {
      throw NumericError("solve_townes: bisection did not reach tol within max steps");
    }
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) {
      throw NumericError("solve_townes: tol below floating-point resolution of the bracket");
    }
    (classify_shot(mid) == at_lo ? lo : hi) = mid;
  }
  const double q0 = 0.5 * (lo + hi);

  double rmax = options.rmax;
  for (int attempt = 0; attempt < 20; ++attempt, rmax += 5.0) {
    // Extend rmax until the matched tail has decayed below 1e-10 q0.
    if (auto profile = build_profile(q0, rmax, options.mesh_intervals)) return *std::move(profile);
  }
  throw NumericError("solve_townes: could not reach far-field decay");
}

RadialProfile solve_townes(ShootingBracket bracket, double rmax, double tol) {
  TownesOptions options;
  options.bracket = bracket;
  options.rmax = rmax;
  options.tol = tol;
  return solve_townes(options);
}

CriticalConstants profile_integrals(const RadialProfile& profile) {
  const auto nodes = profile.nodes();
  double mass = 0.0, kinetic = 0.0, quartic = 0.0;
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    const double lo = nodes[i], hi = nodes[i + 1];
    mass += gauss_legendre<8>([&](double r) {
      const double q = profile.value(r);
      return q * q * r;
    }, lo, hi);
    kinetic += gauss_legendre<8>([&](double r) {
      const double d = profile.derivative(r);
      return d * d * r;
    }, lo, hi);
    quartic += gauss_legendre<8>([&](double r) {
      const double q = profile.value(r);
      return q * q * q * q * r;
    }, lo, hi);
  }
  CriticalConstants c;
  c.mass = kTwoPi * mass;
  c.kinetic = kTwoPi * kinetic;
  c.quartic = kTwoPi * quartic;
  c.astar = c.mass;
  return c;
}

CriticalConstants critical_constants(const RadialProfile& profile) {
  const CriticalConstants c = profile_integrals(profile);
  const double dk = std::abs(c.mass - c.kinetic) / c.mass;
  const double dq = std::abs(c.mass - 0.5 * c.quartic) / c.mass;
  if (dk > kIdentityTolerance || dq > kIdentityTolerance) {
    std::ostringstream msg;
    msg << "critical_constants: identities violated (mass " << c.mass << ", kinetic "
        << c.kinetic << ", quartic/2 " << 0.5 * c.quartic << "); input is not a Townes profile";
    throw NumericError(msg.str());
  }
  return c;
}

double singular_moment(const RadialProfile& profile, double p) {
  if (!(p > 0.0 && p < 2.0)) throw std::invalid_argument("singular_moment: p must lie in (0, 2)");
  const auto nodes = profile.nodes();
  const auto values = profile.values();
  const double mass = profile_integrals(profile).mass;

  // First interval: integrate the even expansion of Q^2 against r^(1-p) exactly.
  const double r1 = nodes[1];
  const double q0 = values[0];
  const double a = (q0 - q0 * q0 * q0) / 4.0;
  const double b = (1.0 - 3.0 * q0 * q0) * a / 16.0;
  double sum = q0 * q0 * std::pow(r1, 2.0 - p) / (2.0 - p) +
               2.0 * q0 * a * std::pow(r1, 4.0 - p) / (4.0 - p) +
               (a * a + 2.0 * q0 * b) * std::pow(r1, 6.0 - p) / (6.0 - p);
  const double exponent = 1.0 - p;
  for (std::size_t i = 1; i + 1 < nodes.size(); ++i) {
    sum += gauss_legendre<10>([&](double r) {
      const double q = profile.value(r);
      return q * q * std::pow(r, exponent);
    }, nodes[i], nodes[i + 1]);
  }
  return kTwoPi * sum / mass;
}

double ode_residual(const RadialProfile& profile) {
  const auto nodes = profile.nodes();
  const auto values = profile.values();
  const auto derivs = profile.derivs();
  constexpr int kSubsteps = 8;
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < nodes.size(); ++i) {
    State y{values[i], derivs[i]};
    const double h = (nodes[i + 1] - nodes[i]) / kSubsteps;
    double r = nodes[i];
    for (int s = 0; s < kSubsteps; ++s) {
      const State k1 = rhs(r, y);
      const State k2 = rhs(r + h / 2, {y[0] + h / 2 * k1[0], y[1] + h / 2 * k1[1]});
      const State k3 = rhs(r + h / 2, {y[0] + h / 2 * k2[0], y[1] + h / 2 * k2[1]});
      const State k4 = rhs(r + h, {y[0] + h * k3[0], y[1] + h * k3[1]});
      for (int c = 0; c < 2; ++c) y[c] += h / 6 * (k1[c] + 2 * k2[c] + 2 * k3[c] + k4[c]);
      r += h;
    }
    const double len = nodes[i + 1] - nodes[i];
    const double defect =
        std::max(std::abs(y[0] - values[i + 1]), std::abs(y[1] - derivs[i + 1])) / len;
    worst = std::max(worst, defect);
  }
  return worst;
}

NormalizedProfile::NormalizedProfile(std::shared_ptr<const RadialProfile> profile)
    : NormalizedProfile(profile, profile_integrals(*profile).mass) {}

NormalizedProfile::NormalizedProfile(std::shared_ptr<const RadialProfile> profile, double mass)
    : profile_(std::move(profile)), scale_(1.0 / std::sqrt(mass)) {
  if (!profile_) throw std::invalid_argument("NormalizedProfile: null profile");
  if (!(mass > 0.0)) throw std::invalid_argument("NormalizedProfile: mass must be positive");
}

const TownesSolution& default_townes() {
  static const TownesSolution solution = [] {
    auto profile = std::make_shared<const RadialProfile>(solve_townes(TownesOptions{}));
    const CriticalConstants constants = critical_constants(*profile);
    return TownesSolution{std::move(profile), constants};
  }();
  return solution;
}

}  // namespace gpc
