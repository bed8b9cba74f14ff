#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

namespace gpc {

/// Pairwise (cascade) sum of f(k) for k in [begin, end). The association
/// order is fixed by the range alone, so results are reproducible bit for bit.
template <class F>
double pairwise_reduce(std::size_t begin, std::size_t end, F&& f) {
  constexpr std::size_t kBlock = 32;
  if (end - begin <= kBlock) {
    double s = 0.0;
    for (std::size_t k = begin; k < end; ++k) s += f(k);
    return s;
  }
  const std::size_t mid = begin + (end - begin) / 2;
  return pairwise_reduce(begin, mid, f) + pairwise_reduce(mid, end, f);
}

inline double pairwise_sum(std::span<const double> values) {
  return pairwise_reduce(0, values.size(), [&](std::size_t k) { return values[k]; });
}

/// Gauss-Legendre rule on [lo, hi] applied to f.
template <unsigned Points = 10, class F>
double gauss_legendre(F&& f, double lo, double hi) {
  return boost::math::quadrature::gauss<double, Points>::integrate(f, lo, hi);
}

}  // namespace gpc
