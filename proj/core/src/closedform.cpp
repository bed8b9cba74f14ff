#include "gpc/closedform.hpp"

#include <cmath>
#include <stdexcept>

#include "gpc/errors.hpp"

namespace gpc {

void CollapseConstants::validate() const {
  if (!(p > 0.0 && p < 2.0)) throw std::invalid_argument("CollapseConstants: p must lie in (0, 2)");
  if (!(h0 > 0.0)) throw std::invalid_argument("CollapseConstants: h0 must be positive");
  if (!(astar > 0.0)) throw std::invalid_argument("CollapseConstants: astar must be positive");
  if (!(ip > 0.0)) throw std::invalid_argument("CollapseConstants: I_p must be positive");
}

double beta_value(const CollapseConstants& c) {
  c.validate();
  const double gap = 2.0 - c.p;
  return std::pow(0.5 * c.astar * c.h0 * c.p * c.ip, 1.0 / gap);
}

double lambda_objective(double lambda, const CollapseConstants& c) {
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda_objective: lambda must be positive");
  return lambda * lambda / c.astar - std::pow(lambda, c.p) * c.h0 * c.ip;
}

double energy_limit(const CollapseConstants& c) {
  c.validate();
  const double gap = 2.0 - c.p;
  const double half_p = 0.5 * c.p;
  return std::pow(c.h0 * c.ip, 2.0 / gap) * std::pow(c.astar, c.p / gap) *
         (std::pow(half_p, 2.0 / gap) - std::pow(half_p, c.p / gap));
}

namespace {

// f(x) - f(y) without the cancellation of evaluating both separately.
double objective_difference(double x, double y, const CollapseConstants& c) {
  const double quadratic = (x - y) * (x + y) / c.astar;
  const double power = std::pow(y, c.p) * std::expm1(c.p * std::log1p((x - y) / y));
  return quadratic - c.h0 * c.ip * power;
}

}  // namespace

LambdaMinimum minimize_lambda(const CollapseConstants& c, double tol) {
  c.validate();
  if (!(tol > 0.0)) throw std::invalid_argument("minimize_lambda: tol must be positive");
  const double gap = 2.0 - c.p;
  const double stationary = std::pow(0.5 * c.astar * c.p * c.h0 * c.ip, 1.0 / gap);

  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = stationary / 10.0;
  double hi = stationary * 10.0;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  LambdaMinimum result;
  constexpr int kMaxIterations = 500;
  while (hi - lo > tol * 0.5 * (lo + hi)) {
    if (++result.iterations > kMaxIterations) {
      throw NumericError("minimize_lambda: golden-section search did not converge");
    }
    if (objective_difference(x1, x2, c) < 0.0) {
      hi = x2;
      x2 = x1;
      x1 = hi - inv_phi * (hi - lo);
    } else {
      lo = x1;
      x1 = x2;
      x2 = lo + inv_phi * (hi - lo);
    }
  }
  result.lambda_star = 0.5 * (lo + hi);
  result.value = lambda_objective(result.lambda_star, c);
  return result;
}

}  // namespace gpc
