#include "gpc/dirichlet_poisson.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include <fftw3.h>

namespace gpc {
namespace {

// FFTW's planner is not thread safe.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

struct DirichletPoisson::Plan {
  int m = 0;
  double* buffer = nullptr;
  fftw_plan plan = nullptr;

  explicit Plan(int size) : m(size) {
    std::lock_guard lock(planner_mutex());
    buffer = fftw_alloc_real(static_cast<std::size_t>(m) * m);
    plan = fftw_plan_r2r_2d(m, m, buffer, buffer, FFTW_RODFT00, FFTW_RODFT00, FFTW_ESTIMATE);
    if (!plan) throw std::runtime_error("DirichletPoisson: FFTW planning failed");
  }
  ~Plan() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
    fftw_free(buffer);
  }
};

DirichletPoisson::DirichletPoisson(const Grid2D& grid, Stencil stencil) : grid_(grid) {
  const int m = grid.n() - 2;
  const double h = grid.spacing();
  eig_.resize(m);
  for (int k = 1; k <= m; ++k) {
    const double theta = std::numbers::pi * k / (m + 1);
    const double c1 = std::cos(theta);
    const double sym = stencil == Stencil::second_order
                           ? 2.0 - 2.0 * c1
                           : (30.0 - 32.0 * c1 + 2.0 * std::cos(2.0 * theta)) / 12.0;
    eig_[k - 1] = sym / (h * h);
  }
  plan_ = std::make_unique<Plan>(m);
}

DirichletPoisson::~DirichletPoisson() = default;

void DirichletPoisson::forward(std::span<const double> full, std::vector<double>& coeffs) {
  const int m = grid_.n() - 2;
  double* buf = plan_->buffer;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) buf[i * m + j] = full[grid_.index(i + 1, j + 1)];
  }
  fftw_execute(plan_->plan);
  coeffs.assign(buf, buf + static_cast<std::size_t>(m) * m);
}

void DirichletPoisson::inverse(const std::vector<double>& coeffs, std::span<double> full) {
  const int m = grid_.n() - 2;
  double* buf = plan_->buffer;
  std::copy(coeffs.begin(), coeffs.end(), buf);
  fftw_execute(plan_->plan);
  // Two unnormalized type-I transforms per axis multiply by (2 (m + 1))^2.
  const double norm = 1.0 / (4.0 * (m + 1.0) * (m + 1.0));
  std::fill(full.begin(), full.end(), 0.0);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) full[grid_.index(i + 1, j + 1)] = norm * buf[i * m + j];
  }
}

void DirichletPoisson::solve(std::span<const double> rhs, double sigma, std::span<double> out) {
  if (!(sigma > 0.0)) throw std::invalid_argument("DirichletPoisson: sigma must be positive");
  const int m = grid_.n() - 2;
  forward(rhs, c1_);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) c1_[i * m + j] /= eig_[i] + eig_[j] + sigma;
  }
  inverse(c1_, out);
}

void DirichletPoisson::tangent_direction(std::span<const double> g, std::span<const double> u,
                                         double sigma, std::span<double> out) {
  if (!(sigma > 0.0)) throw std::invalid_argument("DirichletPoisson: sigma must be positive");
  const int m = grid_.n() - 2;
  forward(g, c1_);
  forward(u, c2_);
  // The transform is orthogonal up to a constant factor, so inner products
  // can be taken between coefficients; the factor cancels in the ratio.
  double pg_u = 0.0, pu_u = 0.0;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      const std::size_t k = static_cast<std::size_t>(i) * m + j;
      const double inv = 1.0 / (eig_[i] + eig_[j] + sigma);
      c1_[k] *= inv;
      pg_u += c1_[k] * c2_[k];
      pu_u += inv * c2_[k] * c2_[k];
    }
  }
  const double coef = pg_u / pu_u;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      const std::size_t k = static_cast<std::size_t>(i) * m + j;
      c1_[k] -= coef * c2_[k] / (eig_[i] + eig_[j] + sigma);
    }
  }
  inverse(c1_, out);
}

}  // namespace gpc
