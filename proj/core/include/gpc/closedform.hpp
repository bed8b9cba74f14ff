#pragma once

namespace gpc {

/// Data entering the collapse asymptotics: dominant singularity power p,
/// well depth h0, the critical constant a*, and the singular moment I_p.
struct CollapseConstants {
  double p = 1.0;
  double h0 = 1.0;
  double astar = 1.0;
  double ip = 1.0;

  /// Throws std::invalid_argument unless 0 < p < 2 and h0, astar, ip > 0.
  void validate() const;
};

/// Limiting dilation beta = (astar * h0 * p * I_p / 2)^(1 / (2 - p)).
double beta_value(const CollapseConstants& c);

/// f(lambda) = lambda^2 / astar - lambda^p * h0 * I_p.
double lambda_objective(double lambda, const CollapseConstants& c);

/// Limit of E(a) (astar - a)^(p / (2 - p)) as a -> astar:
/// (h0 I_p)^(2/(2-p)) astar^(p/(2-p)) ((p/2)^(2/(2-p)) - (p/2)^(p/(2-p))).
double energy_limit(const CollapseConstants& c);

struct LambdaMinimum {
  double lambda_star = 0.0;
  double value = 0.0;
  int iterations = 0;
};

/// Golden-section minimization of lambda_objective on [l/10, 10 l], where l
/// solves the stationarity condition 2 l / astar = p h0 I_p l^(p-1).
/// Iterates until the bracket is narrower than tol * lambda; comparisons use
/// a cancellation-free difference of objective values.
LambdaMinimum minimize_lambda(const CollapseConstants& c, double tol = 1e-12);

}  // namespace gpc
