#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "gpc/minimizer.hpp"

namespace gpc {
namespace {

constexpr unsigned kGaussPoints = 8;
constexpr double kPanelWidth = 0.05;
constexpr int kAngles = 32;
constexpr double kProfileReach = 40.0;  // Q0(40)^2 is far below double precision

struct Cutoff {
  double eta;
  double value(double r) const {
    if (r <= eta) return 1.0;
    if (r >= 2.0 * eta) return 0.0;
    const double s = (r - eta) / eta;
    return 1.0 - s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
  }
  double slope(double r) const {
    if (r <= eta || r >= 2.0 * eta) return 0.0;
    const double s = (r - eta) / eta;
    return -30.0 * s * s * (1.0 - s) * (1.0 - s) / eta;
  }
};

// Gauss-Legendre nodes and weights on [lo, hi] split into panels no wider
// than kPanelWidth, with breakpoints forced at the given positions.
struct RadialRule {
  std::vector<double> x, w;
};

RadialRule panel_rule(double lo, double hi, std::vector<double> breaks) {
  using Gauss = boost::math::quadrature::gauss<double, kGaussPoints>;
  breaks.push_back(lo);
  breaks.push_back(hi);
  std::sort(breaks.begin(), breaks.end());
  RadialRule rule;
  const auto& abscissa = Gauss::abscissa();
  const auto& weights = Gauss::weights();
  for (std::size_t b = 0; b + 1 < breaks.size(); ++b) {
    const double a0 = std::clamp(breaks[b], lo, hi), a1 = std::clamp(breaks[b + 1], lo, hi);
    if (!(a1 > a0)) continue;
    const int panels = std::max(1, static_cast<int>(std::ceil((a1 - a0) / kPanelWidth)));
    const double width = (a1 - a0) / panels;
    for (int k = 0; k < panels; ++k) {
      const double mid = a0 + (k + 0.5) * width, half = 0.5 * width;
      auto push = [&](double t, double wt) {
        rule.x.push_back(mid + half * t);
        rule.w.push_back(half * wt);
      };
      // boost stores the nonnegative half of the symmetric rule
      for (std::size_t i = 0; i < abscissa.size(); ++i) {
        if (abscissa[i] == 0.0) {
          push(0.0, weights[i]);
        } else {
          push(abscissa[i], weights[i]);
          push(-abscissa[i], weights[i]);
        }
      }
    }
  }
  return rule;
}

}  // namespace

double trial_energy(double ell, Vec2 x0, const PotentialSpec& spec, double a,
                    const RadialProfile& profile, double cutoff_eta) {
  if (!(ell > 0.0)) throw std::invalid_argument("trial_energy: ell must be positive");
  if (!(cutoff_eta > 0.0)) throw std::invalid_argument("trial_energy: cutoff_eta must be positive");
  const Cutoff phi{cutoff_eta};
  const double q_scale = 1.0 / std::sqrt(profile_integrals(profile).mass);
  const double two_pi = 2.0 * std::numbers::pi;

  // Split the singular part into the term sitting at x0 (if any) and the rest.
  const SingularPoint* at_x0 = nullptr;
  std::vector<SingularPoint> others;
  for (const SingularPoint& s : spec.points()) {
    const double d = distance(s.x, x0);
    if (d <= 1e-12 * std::max(1.0, norm(x0))) {
      at_x0 = &s;
    } else {
      if (d <= 2.0 * cutoff_eta) {
        throw std::invalid_argument(
            "trial_energy: a singular point other than x0 lies inside the cutoff support");
      }
      others.push_back(s);
    }
  }
  const PotentialSpec rest(spec.background(), others, std::nullopt);

  // Radial integrals in rho = ell * r.
  const double rho_max = std::min(2.0 * cutoff_eta * ell, kProfileReach);
  const RadialRule rule = panel_rule(0.0, rho_max, {cutoff_eta * ell});
  double mass = 0.0, grad = 0.0, quartic = 0.0, smooth_potential = 0.0;
  for (std::size_t k = 0; k < rule.x.size(); ++k) {
    const double rho = rule.x[k];
    const double r = rho / ell;
    const double q = q_scale * profile.value(rho);
    const double dq = q_scale * profile.derivative(rho);
    const double f = phi.value(r);
    const double wr = rule.w[k] * rho;
    mass += wr * f * f * q * q;
    const double g = phi.slope(r) * q + ell * f * dq;
    grad += wr * g * g;
    quartic += wr * std::pow(f * q, 4);
    double ring = 0.0;
    for (int t = 0; t < kAngles; ++t) {
      const double theta = two_pi * t / kAngles;
      ring += evaluate(rest, x0 + Vec2{r * std::cos(theta), r * std::sin(theta)});
    }
    smooth_potential += wr * f * f * q * q * ring / kAngles;
  }
  mass *= two_pi;
  grad *= two_pi;
  quartic *= two_pi;
  smooth_potential *= two_pi;

  double singular_potential = 0.0;
  if (at_x0) {
    // rho = s^m with m = 1 / (2 - p) turns rho^(1-p) d rho into m ds.
    const double p = at_x0->p;
    const double m = 1.0 / (2.0 - p);
    const double s_max = std::pow(rho_max, 2.0 - p);
    std::vector<double> breaks{std::pow(cutoff_eta * ell, 2.0 - p)};
    const RadialRule srule = panel_rule(0.0, s_max, breaks);
    double acc = 0.0;
    for (std::size_t k = 0; k < srule.x.size(); ++k) {
      const double rho = std::pow(srule.x[k], m);
      const double q = q_scale * profile.value(rho);
      const double f = phi.value(rho / ell);
      acc += srule.w[k] * m * f * f * q * q;
    }
    singular_potential = at_x0->h * std::pow(ell, p) * two_pi * acc;
  }

  const double norm2 = 1.0 / mass;  // A^2
  const double kinetic = norm2 * grad;
  const double potential = norm2 * (smooth_potential + singular_potential);
  const double interaction = 0.5 * a * norm2 * norm2 * ell * ell * quartic;
  return kinetic + potential - interaction;
}

}  // namespace gpc
