#include "admitforge/transfer_function.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include <fmt/format.h>

#include "admitforge/error.hpp"

namespace admitforge {

TransferFunction::TransferFunction(Polynomial num, Polynomial den)
    : num_(std::move(num)), den_(std::move(den)) {
  if (den_.is_zero()) throw Error("transfer function denominator is the zero polynomial");
  const double lead = den_.leading();
  if (lead != 1.0) {
    num_ *= 1.0 / lead;
    den_ *= 1.0 / lead;
  }
}

std::string TransferFunction::to_string() const {
  std::string out = "num:";
  for (double c : num_.coefficients()) out += fmt::format(" {:.17g}", c);
  out += " / den:";
  for (double c : den_.coefficients()) out += fmt::format(" {:.17g}", c);
  return out;
}

TransferFunction TransferFunction::parse(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string token;
  if (!(in >> token) || token != "num:") throw ConfigError("transfer function text must start with 'num:'");
  std::vector<double> num;
  std::vector<double> den;
  bool in_den = false;
  while (in >> token) {
    if (token == "/") {
      if (in_den || !(in >> token) || token != "den:") {
        throw ConfigError("transfer function text must contain '/ den:'");
      }
      in_den = true;
      continue;
    }
    double value = 0.0;
    try {
      std::size_t used = 0;
      value = std::stod(token, &used);
      if (used != token.size()) throw std::invalid_argument(token);
    } catch (const std::exception&) {
      throw ConfigError(fmt::format("bad coefficient '{}' in transfer function text", token));
    }
    (in_den ? den : num).push_back(value);
  }
  if (!in_den || num.empty() || den.empty()) {
    throw ConfigError("transfer function text needs both numerator and denominator coefficients");
  }
  return TransferFunction(Polynomial(std::move(num)), Polynomial(std::move(den)));
}

TransferFunction combine(const TransferFunction& a, const TransferFunction& b,
                         Interconnection mode) {
  switch (mode) {
    case Interconnection::kSeries:
      return TransferFunction(a.num() * b.num(), a.den() * b.den());
    case Interconnection::kParallel:
      return TransferFunction(a.num() * b.den() + b.num() * a.den(), a.den() * b.den());
    case Interconnection::kFeedback: {
      Polynomial den = a.den() * b.den() + a.num() * b.num();
      if (den.is_zero()) throw Error("feedback interconnection has a zero denominator");
      return TransferFunction(a.num() * b.den(), std::move(den));
    }
  }
  throw Error("unknown interconnection");
}

std::complex<double> freq_response(const TransferFunction& tf, double omega) {
  if (omega < 0.0) throw Error("frequency must be non-negative");
  const std::complex<double> s{0.0, omega};
  const std::complex<double> d = tf.den()(s);
  if (std::abs(d) < 1e-14) throw Error(fmt::format("pole on evaluation frequency {} rad/s", omega));
  return tf.num()(s) / d;
}

TransferFunction butterworth(int order, double cutoff_hz) {
  if (order < 1 || order > 10) throw Error(fmt::format("butterworth order {} outside 1..10", order));
  if (!(cutoff_hz > 0.0)) throw Error("butterworth cutoff must be positive");
  const double wc = 2.0 * std::numbers::pi * cutoff_hz;
  Polynomial den = Polynomial::constant(1.0);
  for (int k = 1; k <= order / 2; ++k) {
    const double zeta = std::sin((2 * k - 1) * std::numbers::pi / (2.0 * order));
    den *= Polynomial({1.0, 2.0 * zeta * wc, wc * wc});
  }
  if (order % 2 == 1) den *= Polynomial({1.0, wc});
  const double dc = den.constant_term();
  return TransferFunction(Polynomial::constant(dc), std::move(den));
}

std::vector<double> logspace(double lo, double hi, int n) {
  if (n < 1 || !(lo > 0.0) || !(hi >= lo)) throw Error("logspace needs n >= 1 and 0 < lo <= hi");
  std::vector<double> out(static_cast<std::size_t>(n));
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  const double a = std::log10(lo);
  const double b = std::log10(hi);
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = std::pow(10.0, a + (b - a) * i / (n - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

std::vector<double> linspace(double lo, double hi, int n) {
  if (n < 1 || !(hi >= lo)) throw Error("linspace needs n >= 1 and lo <= hi");
  std::vector<double> out(static_cast<std::size_t>(n));
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
  out.back() = hi;
  return out;
}

FrequencyGrid FrequencyGrid::logarithmic(double lower_rad_s, double upper_rad_s, int count) {
  return FrequencyGrid{logspace(lower_rad_s, upper_rad_s, count), Spacing::kLogarithmic};
}

FrequencyGrid FrequencyGrid::linear(double lower_rad_s, double upper_rad_s, int count) {
  if (!(lower_rad_s > 0.0)) throw Error("frequency grid points must be positive");
  return FrequencyGrid{linspace(lower_rad_s, upper_rad_s, count), Spacing::kLinear};
}

namespace {

constexpr double kCrossoverLow = 1e-3;
constexpr double kCrossoverHigh = 1e4;
constexpr int kCrossoverPoints = 2000;

double gain_minus_one(const TransferFunction& tf, double w) {
  return std::abs(freq_response(tf, w)) - 1.0;
}

}  // namespace

std::vector<double> gain_crossovers(const TransferFunction& tf) {
  const auto grid = logspace(kCrossoverLow, kCrossoverHigh, kCrossoverPoints);
  std::vector<double> out;
  double prev = gain_minus_one(tf, grid[0]);
  if (prev == 0.0) out.push_back(grid[0]);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double cur = gain_minus_one(tf, grid[i]);
    if (cur == 0.0) {
      out.push_back(grid[i]);
    } else if (prev != 0.0 && (prev < 0.0) != (cur < 0.0)) {
      double lo = grid[i - 1];
      double hi = grid[i];
      double f_lo = prev;
      while (hi / lo - 1.0 > 1e-6) {
        const double mid = std::sqrt(lo * hi);
        const double f_mid = gain_minus_one(tf, mid);
        if ((f_mid < 0.0) == (f_lo < 0.0)) {
          lo = mid;
          f_lo = f_mid;
        } else {
          hi = mid;
        }
      }
      out.push_back(std::sqrt(lo * hi));
    }
    prev = cur;
  }
  return out;
}

double phase_margin(const TransferFunction& tf) {
  const auto crossings = gain_crossovers(tf);
  if (crossings.empty()) throw Error("no gain crossover");
  double best = std::numeric_limits<double>::infinity();
  for (double w : crossings) {
    double pm = 180.0 + std::arg(freq_response(tf, w)) * 180.0 / std::numbers::pi;
    // Report in (-180, 180].
    if (pm > 180.0) pm -= 360.0;
    best = std::min(best, pm);
  }
  return best;
}

}  // namespace admitforge
