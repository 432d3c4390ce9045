#include "admitforge/polynomial.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "admitforge/error.hpp"

namespace admitforge {

Polynomial::Polynomial(std::initializer_list<double> coeffs) : coeffs_(coeffs) { trim(); }

Polynomial::Polynomial(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) { trim(); }

void Polynomial::trim() {
  auto first = std::find_if(coeffs_.begin(), coeffs_.end(), [](double c) { return c != 0.0; });
  if (first == coeffs_.end()) {
    coeffs_.assign(1, 0.0);
    return;
  }
  coeffs_.erase(coeffs_.begin(), first);
}

double Polynomial::coefficient(int power) const {
  if (power < 0 || power > degree()) return 0.0;
  return coeffs_[coeffs_.size() - 1 - static_cast<std::size_t>(power)];
}

double Polynomial::max_abs_coefficient() const {
  double m = 0.0;
  for (double c : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

double Polynomial::operator()(double s) const {
  double acc = 0.0;
  for (double c : coeffs_) acc = acc * s + c;
  return acc;
}

std::complex<double> Polynomial::operator()(std::complex<double> s) const {
  std::complex<double> acc = 0.0;
  for (double c : coeffs_) acc = acc * s + c;
  return acc;
}

Polynomial Polynomial::derivative() const {
  if (degree() == 0) return Polynomial();
  std::vector<double> d(coeffs_.size() - 1);
  const int n = degree();
  for (int i = 0; i < n; ++i) d[static_cast<std::size_t>(i)] = coeffs_[static_cast<std::size_t>(i)] * (n - i);
  return Polynomial(std::move(d));
}

Polynomial& Polynomial::operator+=(const Polynomial& rhs) {
  if (rhs.coeffs_.size() > coeffs_.size()) {
    coeffs_.insert(coeffs_.begin(), rhs.coeffs_.size() - coeffs_.size(), 0.0);
  }
  const std::size_t offset = coeffs_.size() - rhs.coeffs_.size();
  for (std::size_t i = 0; i < rhs.coeffs_.size(); ++i) coeffs_[offset + i] += rhs.coeffs_[i];
  trim();
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& rhs) { return *this += rhs * -1.0; }

Polynomial& Polynomial::operator*=(const Polynomial& rhs) {
  std::vector<double> out(coeffs_.size() + rhs.coeffs_.size() - 1, 0.0);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    for (std::size_t j = 0; j < rhs.coeffs_.size(); ++j) out[i + j] += coeffs_[i] * rhs.coeffs_[j];
  }
  coeffs_ = std::move(out);
  trim();
  return *this;
}

Polynomial& Polynomial::operator*=(double k) {
  for (double& c : coeffs_) c *= k;
  trim();
  return *this;
}

Polynomial from_roots(std::span<const std::complex<double>> roots) {
  std::vector<std::complex<double>> acc{1.0};
  for (const auto& r : roots) {
    std::vector<std::complex<double>> next(acc.size() + 1, 0.0);
    for (std::size_t i = 0; i < acc.size(); ++i) {
      next[i] += acc[i];
      next[i + 1] -= acc[i] * r;
    }
    acc = std::move(next);
  }
  std::vector<double> coeffs(acc.size());
  std::transform(acc.begin(), acc.end(), coeffs.begin(), [](auto c) { return c.real(); });
  return Polynomial(std::move(coeffs));
}

namespace {

// Parlett-Reinsch balancing with power-of-two scale factors, applied in place.
void balance(Eigen::MatrixXd& m) {
  const Eigen::Index n = m.rows();
  constexpr double kGamma = 0.95;
  bool changed = true;
  for (int sweep = 0; changed && sweep < 100; ++sweep) {
    changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double row = m.row(i).lpNorm<1>() - std::abs(m(i, i));
      const double col = m.col(i).lpNorm<1>() - std::abs(m(i, i));
      if (row == 0.0 || col == 0.0) continue;
      int exponent = 0;
      std::frexp(row / col, &exponent);
      exponent /= 2;
      if (exponent == 0) continue;
      const double scaled_col = std::ldexp(col, exponent);
      const double scaled_row = std::ldexp(row, -exponent);
      if (scaled_col + scaled_row < kGamma * (col + row)) {
        m.row(i) *= std::ldexp(1.0, -exponent);
        m.col(i) *= std::ldexp(1.0, exponent);
        changed = true;
      }
    }
  }
}

}  // namespace

std::vector<std::complex<double>> poly_roots(const Polynomial& p) {
  if (p.is_zero() || p.degree() < 1) throw Error("no roots defined");

  const auto c = p.coefficients();
  const int n = p.degree();

  // Zero roots are exact: strip trailing zero coefficients first.
  int zeros = 0;
  while (zeros < n && c[static_cast<std::size_t>(n - zeros)] == 0.0) ++zeros;
  std::vector<std::complex<double>> roots(static_cast<std::size_t>(zeros), 0.0);
  const int m = n - zeros;
  if (m == 0) return roots;

  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(m, m);
  for (int j = 0; j < m; ++j) companion(0, j) = -c[static_cast<std::size_t>(j + 1)] / c[0];
  for (int i = 1; i < m; ++i) companion(i, i - 1) = 1.0;
  balance(companion);

  Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) throw Error("companion eigenvalue iteration failed");

  const Polynomial dp = p.derivative();
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
    std::complex<double> r = solver.eigenvalues()[i];
    // One Newton step, kept only when it lowers the residual.
    const std::complex<double> f = p(r);
    const std::complex<double> df = dp(r);
    if (std::abs(df) > 0.0) {
      const std::complex<double> polished = r - f / df;
      if (std::abs(p(polished)) < std::abs(f)) r = polished;
    }
    roots.push_back(r);
  }
  return roots;
}

bool is_hurwitz(const Polynomial& p, double margin) {
  const auto roots = poly_roots(p);
  return std::all_of(roots.begin(), roots.end(),
                     [margin](const auto& r) { return r.real() < -margin; });
}

}  // namespace admitforge
