#pragma once

#include <complex>
#include <initializer_list>
#include <span>
#include <vector>

namespace admitforge {

/// Real-coefficient polynomial in the Laplace variable, highest degree first.
///
/// Leading zeros are trimmed on construction. The zero polynomial is stored as
/// the single coefficient 0 and reports degree 0.
class Polynomial {
 public:
  Polynomial() : coeffs_{0.0} {}
  Polynomial(std::initializer_list<double> coeffs);
  explicit Polynomial(std::vector<double> coeffs);

  static Polynomial constant(double c) { return Polynomial({c}); }
  // The polynomial s.
  static Polynomial s() { return Polynomial({1.0, 0.0}); }

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const { return coeffs_.size() == 1 && coeffs_[0] == 0.0; }
  double leading() const { return coeffs_.front(); }
  double constant_term() const { return coeffs_.back(); }
  std::span<const double> coefficients() const { return coeffs_; }
  // Coefficient of s^power (0 when power exceeds the degree).
  double coefficient(int power) const;
  double max_abs_coefficient() const;

  double operator()(double s) const;
  std::complex<double> operator()(std::complex<double> s) const;

  Polynomial derivative() const;

  Polynomial& operator+=(const Polynomial& rhs);
  Polynomial& operator-=(const Polynomial& rhs);
  Polynomial& operator*=(const Polynomial& rhs);
  Polynomial& operator*=(double k);

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, const Polynomial& b) { return a *= b; }
  friend Polynomial operator*(Polynomial a, double k) { return a *= k; }
  friend Polynomial operator*(double k, Polynomial a) { return a *= k; }
  friend bool operator==(const Polynomial&, const Polynomial&) = default;

 private:
  void trim();

  std::vector<double> coeffs_;
};

/// Builds the monic polynomial with the given roots. Complex roots must come in
/// conjugate pairs; the imaginary residue of the expansion is discarded.
Polynomial from_roots(std::span<const std::complex<double>> roots);

/// All degree(p) roots of p, with multiplicity, as eigenvalues of the balanced
/// companion matrix followed by one Newton polish step per root.
std::vector<std::complex<double>> poly_roots(const Polynomial& p);

/// True iff every root of p has real part < -margin.
bool is_hurwitz(const Polynomial& p, double margin = 0.0);

}  // namespace admitforge
