#pragma once

#include <complex>
#include <string>
#include <string_view>
#include <vector>

#include "admitforge/polynomial.hpp"

namespace admitforge {

/// Continuous-time SISO transfer function num(s)/den(s).
///
/// The denominator is normalized to be monic on construction; the numerator is
/// scaled by the same factor. No pole-zero cancellation is ever performed, so
/// products and feedback keep every mode of their operands.
class TransferFunction {
 public:
  TransferFunction() : num_(Polynomial::constant(1.0)), den_(Polynomial::constant(1.0)) {}
  TransferFunction(Polynomial num, Polynomial den);

  static TransferFunction gain(double k) {
    return TransferFunction(Polynomial::constant(k), Polynomial::constant(1.0));
  }

  const Polynomial& num() const { return num_; }
  const Polynomial& den() const { return den_; }

  bool is_proper() const { return num_.is_zero() || num_.degree() <= den_.degree(); }
  bool is_strictly_proper() const { return num_.is_zero() || num_.degree() < den_.degree(); }

  std::complex<double> operator()(std::complex<double> s) const { return num_(s) / den_(s); }

  // Text form `num: c_n ... c_0 / den: d_m ... d_0`.
  std::string to_string() const;
  static TransferFunction parse(std::string_view text);

  friend TransferFunction operator*(double k, const TransferFunction& tf) {
    return TransferFunction(tf.num_ * k, tf.den_);
  }
  friend bool operator==(const TransferFunction&, const TransferFunction&) = default;

 private:
  Polynomial num_;
  Polynomial den_;
};

enum class Interconnection { kSeries, kParallel, kFeedback };

/// Block-diagram algebra. For kFeedback, `a` is the forward path and `b` the
/// negative-feedback path: Na Db / (Da Db + Na Nb).
TransferFunction combine(const TransferFunction& a, const TransferFunction& b,
                         Interconnection mode);

/// tf(j omega). Throws when |den(j omega)| < 1e-14.
std::complex<double> freq_response(const TransferFunction& tf, double omega);

/// Analog Butterworth low-pass of the given order (1..10) with its half-power
/// point at cutoff_hz. DC gain is exactly one.
TransferFunction butterworth(int order, double cutoff_hz);

/// Phase margin in degrees. Gain crossovers are located on 2000 log-spaced
/// points in [1e-3, 1e4] rad/s and refined by bisection; when the magnitude
/// crosses unity more than once the smallest margin is returned.
double phase_margin(const TransferFunction& tf);

/// Angular frequencies of every gain crossover found by phase_margin.
std::vector<double> gain_crossovers(const TransferFunction& tf);

/// Ordered, strictly increasing set of positive angular frequencies (rad/s).
struct FrequencyGrid {
  enum class Spacing { kLinear, kLogarithmic };

  std::vector<double> points;
  Spacing spacing = Spacing::kLogarithmic;

  double lower() const { return points.front(); }
  double upper() const { return points.back(); }

  static FrequencyGrid logarithmic(double lower_rad_s, double upper_rad_s, int count);
  static FrequencyGrid linear(double lower_rad_s, double upper_rad_s, int count);
};

/// n log-spaced values from lo to hi inclusive.
std::vector<double> logspace(double lo, double hi, int n);
/// n evenly spaced values from lo to hi inclusive.
std::vector<double> linspace(double lo, double hi, int n);

}  // namespace admitforge
