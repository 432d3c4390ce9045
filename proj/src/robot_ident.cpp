#include "admitforge/robot_ident.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <regex>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "admitforge/csv.hpp"

namespace admitforge {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_phase(double p) {
  p = std::remainder(p, kTwoPi);
  if (p <= -std::numbers::pi) p += kTwoPi;
  return p;
}

// Complex amplitude a + j b of a*sin(wt) + b*cos(wt) + c fitted over
// samples [first, first + count).
std::complex<double> fit_phasor(const TimeSeries& s, std::size_t first, std::size_t count, double w) {
  Eigen::Matrix3d ata = Eigen::Matrix3d::Zero();
  Eigen::Vector3d aty = Eigen::Vector3d::Zero();
  for (std::size_t i = first; i < first + count; ++i) {
    const Eigen::Vector3d row(std::sin(w * s.t[i]), std::cos(w * s.t[i]), 1.0);
    ata.noalias() += row * row.transpose();
    aty.noalias() += row * s.values[i];
  }
  const Eigen::Vector3d coef = ata.ldlt().solve(aty);
  return {coef(0), coef(1)};
}

}  // namespace

// ---------------------------------------------------------------------------
// Sweep generation

std::vector<double> SweepSpec::default_frequencies() { return logspace(0.01, 20.0, 30); }

void SweepSpec::validate() const {
  std::vector<std::string> problems;
  if (joint_index < 1 || joint_index > 7) problems.push_back(fmt::format("joint_index {} not in 1..7", joint_index));
  if (frequencies_hz.empty()) problems.push_back("no frequencies");
  if (!(sample_rate_hz > 0.0)) problems.push_back("sample_rate must be positive");
  if (!(amplitude_rad >= 0.0)) problems.push_back("amplitude must be non-negative");
  if (!frequencies_hz.empty()) {
    const auto [lo, hi] = std::minmax_element(frequencies_hz.begin(), frequencies_hz.end());
    if (*lo < min_frequency_hz || *hi > max_frequency_hz) {
      problems.push_back(fmt::format("frequencies must lie in [{}, {}] Hz (got {} .. {})", min_frequency_hz,
                                     max_frequency_hz, *lo, *hi));
    }
    if (*lo > 0.0 && !(duration_per_freq_s >= 2.0 / *lo)) {
      problems.push_back(fmt::format("duration_per_freq {} s must be at least 2/min(frequency) = {} s",
                                     duration_per_freq_s, 2.0 / *lo));
    }
    if (!(sample_rate_hz >= 20.0 * *hi)) {
      problems.push_back(fmt::format("sample_rate {} Hz must be at least 20*max(frequency) = {} Hz",
                                     sample_rate_hz, 20.0 * *hi));
    }
  }
  if (!problems.empty()) {
    std::string msg = "invalid sweep spec:";
    for (const auto& p : problems) msg += " " + p + ";";
    throw Error(msg);
  }
}

Sweep generate_sweep(const SweepSpec& spec) {
  spec.validate();
  Sweep sweep;
  sweep.frequencies_hz = spec.frequencies_hz;
  if (spec.amplitude_rad == 0.0) sweep.warnings.push_back("sweep amplitude is zero; records carry no excitation");
  const auto samples = static_cast<std::size_t>(std::llround(spec.duration_per_freq_s * spec.sample_rate_hz));
  const double dt = 1.0 / spec.sample_rate_hz;
  for (double f : spec.frequencies_hz) {
    TimeSeries ts;
    ts.t.resize(samples);
    ts.values.resize(samples);
    for (std::size_t i = 0; i < samples; ++i) {
      ts.t[i] = static_cast<double>(i) * dt;
      ts.values[i] = spec.amplitude_rad * std::sin(kTwoPi * f * ts.t[i]);
    }
    sweep.references.push_back(std::move(ts));
  }
  return sweep;
}

double TimeSeries::sample_period() const {
  if (t.size() < 2) throw Error("time series needs at least two samples");
  return (t.back() - t.front()) / static_cast<double>(t.size() - 1);
}

void TimeSeries::validate() const {
  if (t.size() != values.size()) throw Error("time series t and values differ in length");
  if (t.size() < 2) throw Error("time series needs at least two samples");
  const double dt = sample_period();
  if (!(dt > 0.0)) throw Error("time series must be strictly increasing");
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i > 0 && !(t[i] > t[i - 1])) throw Error("time series must be strictly increasing");
    if (std::abs(t[i] - (t.front() + static_cast<double>(i) * dt)) > 1e-9) {
      throw Error(fmt::format("time series is not uniformly sampled near t = {}", t[i]));
    }
  }
}

// ---------------------------------------------------------------------------
// FRF extraction

FrfPoint extract_frf(const TimeSeries& reference, const TimeSeries& actual, double freq_hz,
                     double transient_fraction) {
  reference.validate();
  actual.validate();
  if (reference.t.size() != actual.t.size()) throw Error("reference and actual records differ in length");
  const double dt = reference.sample_period();
  if (std::abs(dt - actual.sample_period()) > 1e-12) throw Error("reference and actual sample rates differ");
  if (!(freq_hz > 0.0)) throw Error("frequency must be positive");

  const std::size_t n = reference.t.size();
  const auto start = static_cast<std::size_t>(std::ceil(transient_fraction * static_cast<double>(n)));
  const double available = static_cast<double>(n - start) * dt;
  const double periods = std::floor(available * freq_hz + 1e-9);
  if (periods < 1.0) {
    throw Error(fmt::format("frequency {} Hz not resolvable: less than one period after transient trimming",
                            freq_hz));
  }
  const std::size_t count =
      std::min(n - start, static_cast<std::size_t>(std::llround(periods / (freq_hz * dt))));
  const std::size_t first = n - count;

  const double w = kTwoPi * freq_hz;
  const std::complex<double> in = fit_phasor(reference, first, count, w);
  const std::complex<double> out = fit_phasor(actual, first, count, w);
  if (std::abs(in) < 1e-9) throw Error(fmt::format("no excitation at frequency {} Hz", freq_hz));
  const std::complex<double> ratio = out / in;
  return {freq_hz, std::abs(ratio), wrap_phase(std::arg(ratio))};
}

// ---------------------------------------------------------------------------
// FRF datasets

void FrfDataset::validate() const {
  if (points.empty()) throw Error("FRF dataset is empty");
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!(points[i].gain > 0.0)) throw Error(fmt::format("FRF gain at {} Hz is not positive", points[i].freq_hz));
    if (i > 0 && !(points[i].freq_hz > points[i - 1].freq_hz)) {
      throw Error("FRF frequencies must be strictly increasing");
    }
  }
}

FrfDataset FrfDataset::load_csv(const std::filesystem::path& path, int joint_index) {
  const CsvTable csv = read_csv(path);
  csv.require_columns({"freq_hz", "gain", "phase_rad"});
  FrfDataset data;
  data.joint_index = joint_index;
  for (std::size_t r = 0; r < csv.rows(); ++r) {
    data.points.push_back({csv.at(r, "freq_hz"), csv.at(r, "gain"), csv.at(r, "phase_rad")});
  }
  data.validate();
  return data;
}

void FrfDataset::save_csv(const std::filesystem::path& path) const {
  std::vector<std::vector<double>> rows;
  for (const auto& p : points) rows.push_back({p.freq_hz, p.gain, p.phase_rad});
  write_csv(path, {fmt::format("joint: {}", joint_index)}, {"freq_hz", "gain", "phase_rad"}, rows);
}

// ---------------------------------------------------------------------------
// Rational fit

namespace {

// Model in the scaled variable x = s / w0:
//   N(x) = sum_i b_i x^i (i = 0..n),  D(x) = x^d + sum_i a_i x^i (i = 0..d-1).
struct ScaledModel {
  int n = 0;
  int d = 0;
  Eigen::VectorXd theta;  // [b_0..b_n, a_0..a_{d-1}]

  std::complex<double> num(std::complex<double> x) const {
    std::complex<double> acc = 0.0;
    for (int i = n; i >= 0; --i) acc = acc * x + theta(i);
    return acc;
  }
  std::complex<double> den(std::complex<double> x) const {
    std::complex<double> acc = 1.0;
    for (int i = d - 1; i >= 0; --i) acc = acc * x + theta(n + 1 + i);
    return acc;
  }

  Polynomial den_poly() const {
    std::vector<double> c(static_cast<std::size_t>(d + 1));
    c[0] = 1.0;
    for (int i = 0; i < d; ++i) c[static_cast<std::size_t>(d - i)] = theta(n + 1 + i);
    return Polynomial(std::move(c));
  }

  // Back to the Laplace variable s with a monic denominator.
  TransferFunction to_tf(double w0) const {
    std::vector<double> num_c(static_cast<std::size_t>(n + 1));
    std::vector<double> den_c(static_cast<std::size_t>(d + 1));
    // Multiply through by w0^d: coefficient of s^i becomes c_i * w0^(d - i).
    for (int i = 0; i <= n; ++i) num_c[static_cast<std::size_t>(n - i)] = theta(i) * std::pow(w0, d - i);
    den_c[0] = 1.0;
    for (int i = 0; i < d; ++i) den_c[static_cast<std::size_t>(d - i)] = theta(n + 1 + i) * std::pow(w0, d - i);
    return TransferFunction(Polynomial(std::move(num_c)), Polynomial(std::move(den_c)));
  }
};

double model_cost(const ScaledModel& m, const std::vector<std::complex<double>>& x,
                  const std::vector<std::complex<double>>& h, Eigen::VectorXd* residual) {
  double cost = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const std::complex<double> r = m.num(x[k]) / m.den(x[k]) - h[k];
    if (residual) {
      (*residual)(static_cast<Eigen::Index>(2 * k)) = r.real();
      (*residual)(static_cast<Eigen::Index>(2 * k + 1)) = r.imag();
    }
    cost += std::norm(r);
  }
  return cost;
}

bool reflect_unstable_roots(ScaledModel& m) {
  if (m.d == 0) return false;
  auto roots = poly_roots(m.den_poly());
  bool changed = false;
  for (auto& r : roots) {
    if (r.real() >= 0.0) {
      // Roots on the axis are nudged into the open left half-plane.
      r = {r.real() > 0.0 ? -r.real() : -1e-6, r.imag()};
      changed = true;
    }
  }
  if (!changed) return false;
  const Polynomial reflected = from_roots(roots);
  for (int i = 0; i < m.d; ++i) m.theta(m.n + 1 + i) = reflected.coefficient(i);
  return true;
}

}  // namespace

FitResult fit_rational(const FrfDataset& data, int num_order, int den_order, const FitOptions& options) {
  data.validate();
  if (num_order < 0 || den_order < num_order) throw Error("fit needs 0 <= num_order <= den_order");
  if (static_cast<int>(data.points.size()) < num_order + den_order + 1) {
    throw Error(fmt::format("fit of orders ({}, {}) needs at least {} FRF points, got {}", num_order, den_order,
                            num_order + den_order + 1, data.points.size()));
  }

  const double w0 = kTwoPi * data.points.back().freq_hz;
  std::vector<std::complex<double>> x;
  std::vector<std::complex<double>> h;
  double data_norm = 0.0;
  for (const auto& p : data.points) {
    x.emplace_back(0.0, kTwoPi * p.freq_hz / w0);
    h.push_back(p.value());
    data_norm += std::norm(h.back());
  }
  const auto k_count = static_cast<Eigen::Index>(x.size());

  ScaledModel model;
  model.n = num_order;
  model.d = den_order;
  const Eigen::Index p_count = num_order + 1 + den_order;

  // Levy: N(x) - H (D(x) - x^d) = H x^d, linear in theta.
  {
    Eigen::MatrixXd a(2 * k_count, p_count);
    Eigen::VectorXd rhs(2 * k_count);
    for (Eigen::Index k = 0; k < k_count; ++k) {
      const auto xk = x[static_cast<std::size_t>(k)];
      const auto hk = h[static_cast<std::size_t>(k)];
      std::complex<double> xp = 1.0;
      for (int i = 0; i <= num_order; ++i, xp *= xk) {
        a(2 * k, i) = xp.real();
        a(2 * k + 1, i) = xp.imag();
      }
      xp = 1.0;
      for (int i = 0; i < den_order; ++i, xp *= xk) {
        const std::complex<double> v = -hk * xp;
        a(2 * k, num_order + 1 + i) = v.real();
        a(2 * k + 1, num_order + 1 + i) = v.imag();
      }
      const std::complex<double> r = hk * std::pow(xk, den_order);
      rhs(2 * k) = r.real();
      rhs(2 * k + 1) = r.imag();
    }
    model.theta = a.colPivHouseholderQr().solve(rhs);
  }
  reflect_unstable_roots(model);

  // Levenberg-damped Gauss-Newton on the complex residual.
  Eigen::VectorXd residual(2 * k_count);
  double cost = model_cost(model, x, h, &residual);
  double lambda = 1e-3;
  int iterations = 0;
  bool converged = false;
  const double floor_cost = 1e-30 * data_norm;
  Eigen::MatrixXd jac(2 * k_count, p_count);
  while (iterations < options.max_iterations) {
    if (cost <= floor_cost) {
      converged = true;
      break;
    }
    ++iterations;
    for (Eigen::Index k = 0; k < k_count; ++k) {
      const auto xk = x[static_cast<std::size_t>(k)];
      const std::complex<double> dk = model.den(xk);
      const std::complex<double> nk = model.num(xk);
      std::complex<double> xp = 1.0;
      for (int i = 0; i <= num_order; ++i, xp *= xk) {
        const std::complex<double> g = xp / dk;
        jac(2 * k, i) = g.real();
        jac(2 * k + 1, i) = g.imag();
      }
      xp = 1.0;
      for (int i = 0; i < den_order; ++i, xp *= xk) {
        const std::complex<double> g = -nk * xp / (dk * dk);
        jac(2 * k, num_order + 1 + i) = g.real();
        jac(2 * k + 1, num_order + 1 + i) = g.imag();
      }
    }
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::VectorXd jtr = jac.transpose() * residual;
    bool accepted = false;
    while (lambda < 1e16) {
      Eigen::MatrixXd damped = jtj;
      damped.diagonal() += lambda * jtj.diagonal().cwiseMax(1e-12);
      ScaledModel trial = model;
      trial.theta -= damped.ldlt().solve(jtr);
      Eigen::VectorXd trial_residual(2 * k_count);
      const double trial_cost = model_cost(trial, x, h, &trial_residual);
      if (std::isfinite(trial_cost) && trial_cost <= cost) {
        const double decrease = (cost - trial_cost) / cost;
        model = std::move(trial);
        residual = std::move(trial_residual);
        cost = trial_cost;
        lambda = std::max(lambda / 3.0, 1e-12);
        accepted = true;
        if (decrease < options.tolerance) converged = true;
        break;
      }
      lambda *= 4.0;
    }
    // No downhill step at any damping: already at a stationary point.
    if (!accepted) converged = true;
    if (converged) break;
  }

  const TransferFunction tf = model.to_tf(w0);
  if (!converged) {
    throw FitError(fmt::format("rational fit did not converge in {} iterations (last iterate {})",
                               options.max_iterations, tf.to_string()),
                   tf);
  }
  if (den_order > 0 && !is_hurwitz(tf.den())) throw FitError("unstable model", tf);

  FitResult result{tf, data_norm > 0.0 ? cost / data_norm : cost, iterations, {}};
  for (std::size_t k = 0; k < x.size(); ++k) {
    result.residuals.push_back(freq_response(tf, kTwoPi * data.points[k].freq_hz) - h[k]);
  }
  return result;
}

// ---------------------------------------------------------------------------
// Sweep log files

std::string sweep_log_name(int joint_index, double freq_hz) {
  return fmt::format("joint{}_f{:.6g}.csv", joint_index, freq_hz);
}

double canonical_log_frequency(double freq_hz) { return std::stod(fmt::format("{:.6g}", freq_hz)); }

std::optional<SweepLogName> parse_sweep_log_name(const std::string& filename) {
  static const std::regex pattern(R"(joint([1-7])_f([0-9.eE+-]+)\.csv)");
  std::smatch m;
  if (!std::regex_match(filename, m, pattern)) return std::nullopt;
  try {
    std::size_t used = 0;
    const std::string f = m[2].str();
    const double hz = std::stod(f, &used);
    if (used != f.size() || !(hz > 0.0)) return std::nullopt;
    return SweepLogName{std::stoi(m[1].str()), hz};
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

void write_sweep_log(const std::filesystem::path& path, const TimeSeries& reference,
                     const std::vector<double>& actual) {
  if (actual.size() != reference.t.size()) throw Error("sweep log columns differ in length");
  std::vector<std::vector<double>> rows;
  rows.reserve(actual.size());
  for (std::size_t i = 0; i < actual.size(); ++i) rows.push_back({reference.t[i], reference.values[i], actual[i]});
  write_csv(path, {}, {"t", "ref", "actual"}, rows, 12);
}

std::pair<TimeSeries, TimeSeries> read_sweep_log(const std::filesystem::path& path) {
  const CsvTable csv = read_csv(path);
  csv.require_columns({"t", "ref", "actual"});
  TimeSeries ref{csv.column("t"), csv.column("ref")};
  TimeSeries act{ref.t, csv.column("actual")};
  return {std::move(ref), std::move(act)};
}

}  // namespace admitforge
