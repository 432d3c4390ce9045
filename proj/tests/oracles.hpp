#pragma once

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "admitforge/polynomial.hpp"
#include "admitforge/transfer_function.hpp"

namespace admitforge::testing {

// Routh-Hurwitz test for strict left-half-plane roots. A zero in the first
// column counts as not strictly stable.
inline bool routh_hurwitz_stable(const Polynomial& p) {
  std::vector<double> c(p.coefficients().begin(), p.coefficients().end());
  if (c.front() < 0) {
    for (double& x : c) x = -x;
  }
  const std::size_t n = c.size();
  if (n < 2) return false;
  std::vector<double> upper, lower;
  for (std::size_t i = 0; i < n; i += 2) upper.push_back(c[i]);
  for (std::size_t i = 1; i < n; i += 2) lower.push_back(c[i]);
  lower.resize(upper.size(), 0.0);
  for (std::size_t row = 1; row < n; ++row) {
    if (!(lower[0] > 0.0)) return false;
    std::vector<double> next(upper.size(), 0.0);
    for (std::size_t j = 0; j + 1 < upper.size(); ++j) {
      next[j] = (lower[0] * upper[j + 1] - upper[0] * lower[j + 1]) / lower[0];
    }
    upper = lower;
    lower = next;
  }
  return true;
}

inline double rel_err(std::complex<double> a, std::complex<double> b) {
  return std::abs(a - b) / std::max(std::abs(b), 1e-300);
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// Central difference of a scalar function.
template <typename F>
double central_difference(F&& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

// Monic polynomial with random roots: real parts in [re_lo, re_hi], about half
// of them as conjugate pairs.
inline Polynomial random_poly_from_roots(std::mt19937_64& rng, int degree, double re_lo, double re_hi) {
  std::uniform_real_distribution<double> re(re_lo, re_hi);
  std::uniform_real_distribution<double> im(0.1, 20.0);
  std::bernoulli_distribution pair(0.5);
  std::vector<std::complex<double>> roots;
  while (static_cast<int>(roots.size()) < degree) {
    if (degree - static_cast<int>(roots.size()) >= 2 && pair(rng)) {
      const std::complex<double> r(re(rng), im(rng));
      roots.push_back(r);
      roots.push_back(std::conj(r));
    } else {
      roots.emplace_back(re(rng), 0.0);
    }
  }
  return from_roots(roots);
}

inline Polynomial random_poly(std::mt19937_64& rng, int degree, double lo = -5.0, double hi = 5.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> c(static_cast<std::size_t>(degree) + 1);
  for (double& x : c) x = u(rng);
  if (c[0] == 0.0) c[0] = 1.0;
  return Polynomial(c);
}

// Stable strictly proper-or-proper TF with denominator degree den_deg.
inline TransferFunction random_stable_tf(std::mt19937_64& rng, int num_deg, int den_deg) {
  return TransferFunction(random_poly(rng, num_deg), random_poly_from_roots(rng, den_deg, -50.0, -0.5));
}

}  // namespace admitforge::testing
