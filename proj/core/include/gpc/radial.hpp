#pragma once

#include <memory>
#include <span>
#include <vector>

namespace gpc {

/// Sampled Townes profile Q(r), the positive radial solution of
/// Q'' + Q'/r - Q + Q^3 = 0, on a graded radial mesh starting at r = 0.
///
/// Between nodes the profile is evaluated by cubic Hermite interpolation of
/// (Q, Q'); beyond rmax it continues with the matched K0 decay.
class RadialProfile {
 public:
  /// Validates the invariants: nodes[0] = 0 and strictly increasing,
  /// values strictly decreasing and positive, derivs[0] = 0, and far-field
  /// decay values.back() < 1e-10 * q0.
  RadialProfile(std::vector<double> nodes, std::vector<double> values,
                std::vector<double> derivs);

  std::span<const double> nodes() const { return nodes_; }
  std::span<const double> values() const { return values_; }
  std::span<const double> derivs() const { return derivs_; }
  double q0() const { return values_.front(); }
  double rmax() const { return nodes_.back(); }

  double value(double r) const;
  double derivative(double r) const;

  /// c * Q on the same mesh (used to probe the identity checks).
  RadialProfile scaled(double c) const;

 private:
  std::size_t interval(double r) const;

  std::vector<double> nodes_;
  std::vector<double> values_;
  std::vector<double> derivs_;
};

struct ShootingBracket {
  double lo = 2.0;
  double hi = 2.5;
};

struct TownesOptions {
  ShootingBracket bracket{};
  double rmax = 30.0;
  double tol = 1e-12;
  int mesh_intervals = 4000;
  int max_bisections = 200;
};

/// Outcome of a single shot from Q(0) = q0.
enum class ShotOutcome {
  undershoot,  ///< Q crosses zero (q0 above the ground state value)
  overshoot,   ///< Q' turns positive while Q > 0 (q0 below it)
};

ShotOutcome classify_shot(double q0, double rmax = 60.0);

/// Bisection shooting on Q(0) followed by a mesh solve with an exponentially
/// decaying tail. Throws std::invalid_argument on a non-straddling bracket or
/// bad arguments and gpc::NumericError when the bisection does not reach tol.
RadialProfile solve_townes(const TownesOptions& options);
RadialProfile solve_townes(ShootingBracket bracket, double rmax, double tol);

struct CriticalConstants {
  double astar = 0.0;
  double mass = 0.0;     ///< integral of Q^2
  double kinetic = 0.0;  ///< integral of |grad Q|^2
  double quartic = 0.0;  ///< integral of Q^4
};

/// Relative tolerance of the identity mass = kinetic = quartic / 2.
inline constexpr double kIdentityTolerance = 1e-5;

/// Integrals of the profile over R^2; throws gpc::NumericError when the
/// identities disagree beyond kIdentityTolerance (the input is not a solution).
CriticalConstants critical_constants(const RadialProfile& profile);

/// Same integrals without the consistency check.
CriticalConstants profile_integrals(const RadialProfile& profile);

/// I_p = integral over R^2 of Q0(x)^2 / |x|^p with Q0 = Q / ||Q||_2, 0 < p < 2.
double singular_moment(const RadialProfile& profile, double p);

/// Largest one-interval defect of the ODE over interior mesh intervals,
/// divided by the interval length: each interval is re-integrated from the
/// stored left state by an independent fixed-step RK4 and compared with the
/// stored right state.
double ode_residual(const RadialProfile& profile);

/// Unit-mass view Q0 = Q / sqrt(mass) of a profile; holds only the scale.
class NormalizedProfile {
 public:
  explicit NormalizedProfile(std::shared_ptr<const RadialProfile> profile);
  NormalizedProfile(std::shared_ptr<const RadialProfile> profile, double mass);

  double value(double r) const { return scale_ * profile_->value(r); }
  double derivative(double r) const { return scale_ * profile_->derivative(r); }
  const RadialProfile& profile() const { return *profile_; }

 private:
  std::shared_ptr<const RadialProfile> profile_;
  double scale_;
};

struct TownesSolution {
  std::shared_ptr<const RadialProfile> profile;
  CriticalConstants constants;
};

/// Profile and constants from solve_townes with default options; computed
/// once per process.
const TownesSolution& default_townes();

}  // namespace gpc
