#include "admitforge/sim_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <unsupported/Eigen/MatrixFunctions>
#include <fmt/format.h>

#include "admitforge/csv.hpp"
#include "admitforge/error.hpp"

namespace admitforge {

namespace {

constexpr double kRk4StabilityBudget = 1.5;
constexpr double kTieRatio = 0.99;
constexpr double kMinClassifyDuration = 5.0;

double rms(std::span<const double> x) {
  if (x.empty()) return 0.0;
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return std::sqrt(acc / static_cast<double>(x.size()));
}

}  // namespace

std::complex<double> StateSpace::response(double omega) const {
  if (order() == 0) return d;
  const Eigen::Index n = order();
  // Osborne balancing by powers of two keeps companion forms with widely spread poles well conditioned.
  Eigen::VectorXd scale = Eigen::VectorXd::Ones(n);
  Eigen::MatrixXd bal = a;
  for (bool changed = true; changed;) {
    changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double col = bal.col(i).cwiseAbs().sum() - std::abs(bal(i, i));
      const double row = bal.row(i).cwiseAbs().sum() - std::abs(bal(i, i));
      if (col == 0.0 || row == 0.0) continue;
      double f = 1.0;
      double c = col;
      while (c < row / 2.0) { c *= 2.0; f *= 2.0; }
      while (c >= row * 2.0) { c /= 2.0; f /= 2.0; }
      if ((c + row / f) < 0.95 * (col + row)) {
        bal.col(i) *= f;
        bal.row(i) /= f;
        scale(i) *= f;
        changed = true;
      }
    }
  }
  const Eigen::MatrixXcd m = std::complex<double>(0.0, omega) * Eigen::MatrixXcd::Identity(n, n) -
                             bal.cast<std::complex<double>>();
  const Eigen::VectorXcd rhs = b.cwiseQuotient(scale).cast<std::complex<double>>();
  const auto lu = m.partialPivLu();
  Eigen::VectorXcd x = lu.solve(rhs);
  x += lu.solve(rhs - m * x);
  return (c.cwiseProduct(scale.transpose()).cast<std::complex<double>>() * x)(0) + d;
}

StateSpace to_statespace(const TransferFunction& tf) {
  if (!tf.is_proper()) throw Error("improper transfer function");
  const Polynomial& den = tf.den();  // monic
  const int n = den.degree();
  StateSpace ss;
  ss.d = tf.num().coefficient(n);
  ss.a = Eigen::MatrixXd::Zero(n, n);
  ss.b = Eigen::VectorXd::Zero(n);
  ss.c = Eigen::RowVectorXd::Zero(n);
  if (n == 0) return ss;
  for (int i = 0; i + 1 < n; ++i) ss.a(i, i + 1) = 1.0;
  for (int j = 0; j < n; ++j) {
    ss.a(n - 1, j) = -den.coefficient(j);
    ss.c(j) = tf.num().coefficient(j) - den.coefficient(j) * ss.d;
  }
  ss.b(n - 1) = 1.0;
  return ss;
}

std::vector<double> sinusoid_response_exact(const TransferFunction& tf, double amplitude,
                                            double freq_hz, std::span<const double> t) {
  std::vector<double> y(t.size(), 0.0);
  if (t.empty()) return y;
  if (t[0] != 0.0) throw Error("exact sinusoid response needs samples starting at t = 0");
  const double w = 2.0 * std::numbers::pi * freq_hz;
  const StateSpace ss = to_statespace(tf);
  const Eigen::Index n = ss.order();
  if (n == 0) {
    for (std::size_t k = 0; k < t.size(); ++k) y[k] = ss.d * amplitude * std::sin(w * t[k]);
    return y;
  }
  const double dt = t.size() > 1 ? t[1] - t[0] : 0.0;
  const Eigen::MatrixXcd m = std::complex<double>(0.0, w) * Eigen::MatrixXcd::Identity(n, n) -
                             ss.a.cast<std::complex<double>>();
  // Steady-state state phasor for the input amplitude * e^{j w t}.
  const Eigen::VectorXcd phasor = m.partialPivLu().solve(ss.b.cast<std::complex<double>>()) * amplitude;
  const Eigen::MatrixXd step = (ss.a * dt).exp();
  Eigen::VectorXd transient = -phasor.imag();
  for (std::size_t k = 0; k < t.size(); ++k) {
    const std::complex<double> rot = std::polar(1.0, w * t[k]);
    const Eigen::VectorXd steady = (phasor * rot).imag();
    y[k] = ss.c.dot(steady + transient) + ss.d * amplitude * std::sin(w * t[k]);
    transient = step * transient;
  }
  return y;
}

ForceProfile pulse_profile(double amplitude, double width) {
  return [amplitude, width](double t) { return (t >= 0.0 && t < width) ? amplitude : 0.0; };
}

ForceProfile step_profile(double amplitude) {
  return [amplitude](double t) { return t >= 0.0 ? amplitude : 0.0; };
}

ForceProfile zero_profile() {
  return [](double) { return 0.0; };
}

ForceProfile tabulated_profile(std::vector<double> t, std::vector<double> f) {
  if (t.empty() || t.size() != f.size()) throw ConfigError("force profile needs matching, nonempty t and f");
  if (!std::is_sorted(t.begin(), t.end())) throw ConfigError("force profile times must be increasing");
  return [t = std::move(t), f = std::move(f)](double time) {
    if (time <= t.front()) return f.front();
    if (time >= t.back()) return f.back();
    const auto it = std::upper_bound(t.begin(), t.end(), time);
    const std::size_t i = static_cast<std::size_t>(it - t.begin());
    const double span = t[i] - t[i - 1];
    if (span <= 0.0) return f[i];
    const double alpha = (time - t[i - 1]) / span;
    return f[i - 1] + alpha * (f[i] - f[i - 1]);
  };
}

ForceProfile load_force_profile(const std::filesystem::path& path) {
  const CsvTable csv = read_csv(path);
  csv.require_columns({"t", "f"});
  return tabulated_profile(csv.column("t"), csv.column("f"));
}

void SimResult::save_csv(const std::filesystem::path& path) const {
  std::vector<std::vector<double>> rows;
  rows.reserve(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) rows.push_back({t[i], v[i], f_int[i]});
  std::vector<std::string> comments;
  comments.push_back(fmt::format("diverged: {}", diverged ? 1 : 0));
  comments.push_back(fmt::format("rk4_substeps: {}", substeps));
  write_csv(path, comments, {"t", "v", "f_int"}, rows);
}

SimResult simulate_loop(const TransferFunction& robot, const TransferFunction& controller,
                        const TransferFunction& filter, const TransferFunction& impedance,
                        const ForceProfile& force, const SimOptions& options) {
  if (!(options.dt > 0.0) || !(options.duration > 0.0)) throw Error("simulation needs dt > 0 and duration > 0");
  const StateSpace fwd = to_statespace(combine(robot, controller, Interconnection::kSeries));
  const StateSpace fb = to_statespace(combine(filter, impedance, Interconnection::kSeries));

  const double loop = 1.0 + fwd.d * fb.d;
  if (std::abs(loop) < 1e-12) throw Error("algebraic loop is ill-posed (1 + D_fwd D_fb = 0)");
  const double k = 1.0 / loop;

  // Closed loop in x = [x_fwd; x_fb]:
  //   v = k (C_f x_f - D_f C_b x_b + D_f u)
  //   e = u - C_b x_b - D_b v
  const Eigen::Index nf = fwd.order();
  const Eigen::Index nb = fb.order();
  const Eigen::Index n = nf + nb;
  Eigen::RowVectorXd cv = Eigen::RowVectorXd::Zero(n);
  cv.head(nf) = k * fwd.c;
  cv.tail(nb) = -k * fwd.d * fb.c;
  const double dv = k * fwd.d;
  Eigen::RowVectorXd ce = -fb.d * cv;
  ce.tail(nb) -= fb.c;
  const double de = 1.0 - fb.d * dv;

  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  a.topLeftCorner(nf, nf) = fwd.a;
  a.topRows(nf) += fwd.b * ce;
  b.head(nf) = fwd.b * de;
  a.bottomRightCorner(nb, nb) = fb.a;
  a.bottomRows(nb) += fb.b * cv;
  b.tail(nb) = fb.b * dv;

  double rho = 0.0;
  if (n > 0) {
    Eigen::EigenSolver<Eigen::MatrixXd> eig(a, false);
    for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i) rho = std::max(rho, std::abs(eig.eigenvalues()[i]));
  }

  SimResult out;
  out.substeps = std::max(1, static_cast<int>(std::ceil(options.dt * rho / kRk4StabilityBudget)));
  const double h = options.dt / out.substeps;
  const auto steps = static_cast<std::size_t>(std::llround(options.duration / options.dt));
  out.t.reserve(steps + 1);
  out.v.reserve(steps + 1);
  out.f_int.reserve(steps + 1);

  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd k1(n), k2(n), k3(n), k4(n), probe(n);
  auto record = [&](double time) {
    const double u = force(time);
    const double v = cv.dot(x) + dv * u;
    out.t.push_back(time);
    out.v.push_back(v);
    out.f_int.push_back(ce.dot(x) + de * u);
    return std::isfinite(v) && std::abs(v) <= options.divergence_limit;
  };

  if (!record(0.0)) out.diverged = true;
  for (std::size_t step = 0; step < steps && !out.diverged; ++step) {
    const double t0 = static_cast<double>(step) * options.dt;
    for (int sub = 0; sub < out.substeps; ++sub) {
      const double ts = t0 + sub * h;
      const double u0 = force(ts);
      const double um = force(ts + 0.5 * h);
      const double u1 = force(ts + h);
      k1.noalias() = a * x + b * u0;
      probe = x + 0.5 * h * k1;
      k2.noalias() = a * probe + b * um;
      probe = x + 0.5 * h * k2;
      k3.noalias() = a * probe + b * um;
      probe = x + h * k3;
      k4.noalias() = a * probe + b * u1;
      x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    if (!record(static_cast<double>(step + 1) * options.dt)) out.diverged = true;
  }

  const int windows = std::max(1, options.rms_windows);
  const std::size_t len = out.v.size() / static_cast<std::size_t>(windows);
  if (len > 0) {
    for (int w = 0; w < windows; ++w) {
      out.window_rms.push_back(rms(std::span<const double>(out.v).subspan(static_cast<std::size_t>(w) * len, len)));
    }
  }
  return out;
}

const char* to_string(OracleVerdict v) { return v == OracleVerdict::kStable ? "stable" : "unstable"; }

OracleVerdict classify(const SimResult& result) {
  if (result.diverged) return OracleVerdict::kUnstable;
  if (result.t.empty() || result.t.back() - result.t.front() < kMinClassifyDuration - 1e-9) {
    throw Error(fmt::format("classification needs at least {} s of simulated response", kMinClassifyDuration));
  }
  const std::span<const double> v(result.v);
  const std::size_t q = v.size() / 4;
  const double second = rms(v.subspan(q, q));
  const double last = rms(v.subspan(3 * q));
  if (second == 0.0 && last == 0.0) return OracleVerdict::kStable;
  return last >= kTieRatio * second ? OracleVerdict::kUnstable : OracleVerdict::kStable;
}

}  // namespace admitforge
