#pragma once

#include <complex>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "admitforge/error.hpp"
#include "admitforge/transfer_function.hpp"

namespace admitforge {

/// Constant-amplitude sinusoidal excitation of one joint at a list of
/// frequencies, one record per frequency.
struct SweepSpec {
  int joint_index = 1;
  std::vector<double> frequencies_hz = default_frequencies();
  double amplitude_rad = 0.1;
  double duration_per_freq_s = 240.0;
  double sample_rate_hz = 1000.0;
  double min_frequency_hz = 0.01;
  double max_frequency_hz = 20.0;

  /// Throws Error naming every violated bound.
  void validate() const;

  /// 30 log-spaced points in [0.01, 20] Hz.
  static std::vector<double> default_frequencies();
};

/// Uniformly sampled signal; t in s.
struct TimeSeries {
  std::vector<double> t;
  std::vector<double> values;

  double sample_period() const;
  /// Checks equal lengths, strictly increasing t, and spacing uniform to 1e-9 s.
  void validate() const;
};

struct Sweep {
  std::vector<double> frequencies_hz;
  std::vector<TimeSeries> references;
  std::vector<std::string> warnings;
};

Sweep generate_sweep(const SweepSpec& spec);

struct FrfPoint {
  double freq_hz = 0.0;
  double gain = 0.0;
  double phase_rad = 0.0;

  std::complex<double> value() const { return std::polar(gain, phase_rad); }
};

struct FrfDataset {
  int joint_index = 0;
  std::vector<FrfPoint> points;

  /// Frequencies strictly increasing, gains positive.
  void validate() const;

  /// CSV `freq_hz,gain,phase_rad`.
  static FrfDataset load_csv(const std::filesystem::path& path, int joint_index = 0);
  void save_csv(const std::filesystem::path& path) const;
};

/// Gain and phase of `actual` relative to `reference` at freq_hz.
///
/// The first `transient_fraction` of the record is dropped. Over the last
/// whole number of periods that remain, each series is least-squares fitted
/// with sin, cos and an offset at freq_hz. Phase is wrapped to (-pi, pi].
FrfPoint extract_frf(const TimeSeries& reference, const TimeSeries& actual, double freq_hz,
                     double transient_fraction = 0.25);

struct FitOptions {
  int max_iterations = 200;
  double tolerance = 1e-10;  // relative cost decrease that counts as converged
};

struct FitResult {
  TransferFunction tf;
  // sum |tf(j w_k) - H_k|^2 / sum |H_k|^2
  double relative_cost = 0.0;
  int iterations = 0;
  std::vector<std::complex<double>> residuals;
};

class FitError : public Error {
 public:
  FitError(const std::string& what, TransferFunction last) : Error(what), last_iterate(std::move(last)) {}
  TransferFunction last_iterate;
};

/// Unweighted least-squares rational fit of the FRF with a monic denominator.
///
/// Starts from Levy's linearized solution, reflects any right-half-plane
/// denominator root into the left half-plane, then polishes with damped
/// Gauss-Newton on the true complex residual. The returned model is stable or
/// a FitError ("unstable model" / non-convergence) is thrown.
FitResult fit_rational(const FrfDataset& data, int num_order, int den_order,
                       const FitOptions& options = {});

// Sweep log files: `joint<i>_f<Hz>.csv` with columns t,ref,actual.
std::string sweep_log_name(int joint_index, double freq_hz);
struct SweepLogName {
  int joint_index = 0;
  double freq_hz = 0.0;
};
std::optional<SweepLogName> parse_sweep_log_name(const std::string& filename);
/// Frequency as it round-trips through sweep_log_name.
double canonical_log_frequency(double freq_hz);

void write_sweep_log(const std::filesystem::path& path, const TimeSeries& reference,
                     const std::vector<double>& actual);
std::pair<TimeSeries, TimeSeries> read_sweep_log(const std::filesystem::path& path);

}  // namespace admitforge
