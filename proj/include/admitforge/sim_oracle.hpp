#pragma once

#include <filesystem>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "admitforge/transfer_function.hpp"

namespace admitforge {

/// SISO state-space realization x' = A x + B u, y = C x + D u.
struct StateSpace {
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
  Eigen::RowVectorXd c;
  double d = 0.0;

  Eigen::Index order() const { return a.rows(); }
  std::complex<double> response(double omega) const;
};

/// Controllable canonical realization. Throws "improper transfer function"
/// when the numerator degree exceeds the denominator degree.
StateSpace to_statespace(const TransferFunction& tf);

/// Output of tf driven from rest by amplitude*sin(2 pi f t), sampled at the
/// uniformly spaced times `t` (t[0] must be 0). Uses the closed-form
/// steady-state phasor plus the matrix-exponential transient, so the samples
/// are exact up to rounding.
std::vector<double> sinusoid_response_exact(const TransferFunction& tf, double amplitude,
                                            double freq_hz, std::span<const double> t);

/// Force input in N as a function of time in s.
using ForceProfile = std::function<double(double)>;

ForceProfile pulse_profile(double amplitude, double width);
ForceProfile step_profile(double amplitude);
ForceProfile zero_profile();
/// Piecewise-linear through (t, f) samples, holding the end values outside.
ForceProfile tabulated_profile(std::vector<double> t, std::vector<double> f);
/// CSV `t,f`.
ForceProfile load_force_profile(const std::filesystem::path& path);

struct SimOptions {
  double duration = 20.0;  // s
  double dt = 1e-3;        // output sample period, s
  double divergence_limit = 1e9;
  int rms_windows = 20;
};

struct SimResult {
  std::vector<double> t;
  std::vector<double> v;      // end-effector velocity, m/s
  std::vector<double> f_int;  // filtered interaction force entering Y, N
  std::vector<double> window_rms;
  bool diverged = false;
  int substeps = 1;  // RK4 steps per output sample

  void save_csv(const std::filesystem::path& path) const;
};

/// Integrates the closed loop v = G Y (u - H Zeq v) with fixed-step RK4.
///
/// The forward path G*Y and feedback path H*Zeq are realized separately, so
/// Zeq may be improper on its own. Each output step is split into enough RK4
/// substeps that h * rho(A_cl) <= 1.5. Integration stops early with
/// `diverged` set once |v| exceeds the divergence limit or turns non-finite.
SimResult simulate_loop(const TransferFunction& robot, const TransferFunction& controller,
                        const TransferFunction& filter, const TransferFunction& impedance,
                        const ForceProfile& force, const SimOptions& options = {});

enum class OracleVerdict { kStable, kUnstable };

const char* to_string(OracleVerdict v);

/// Unstable iff the run diverged or the RMS of v over the final quarter is at
/// least 0.99 times the RMS over the second quarter. Requires >= 5 s of data.
OracleVerdict classify(const SimResult& result);

}  // namespace admitforge
