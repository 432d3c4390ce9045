#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>

#include "admitforge/impedance.hpp"
#include "admitforge/kinematics.hpp"
#include "admitforge/loop_analysis.hpp"
#include "admitforge/sim_oracle.hpp"
#include "admitforge/transparency.hpp"

namespace admitforge::cli {

/// Toolkit configuration: an INI file with the sections below. Every key can be
/// overridden by an environment variable ADMITFORGE_<SECTION>_<KEY> (upper
/// case), e.g. ADMITFORGE_GRID_M_COUNT=30.
struct ToolkitConfig {
  struct Robot {
    std::optional<std::filesystem::path> dh_table;  // built-in iiwa7 table when absent
    JointVector theta_nom = JointConfig::nominal().angles();
    JointLimits limits = JointLimits::iiwa_defaults();
    // "iiwa" (built-in identified models), "identity", or "files".
    std::string joint_models = "iiwa";
    std::array<std::optional<std::filesystem::path>, kNumJoints> joint_tf{};
    std::optional<std::filesystem::path> model_tf;  // precomputed G(s), skips synthesis
    std::string row_axis = "vx";
    std::string col_axis = "vx";
    std::optional<std::array<double, kNumJoints>> reference_weights;
    double reference_tolerance = 0.02;
  } robot;

  struct Ident {
    int num_order = 1;
    int den_order = 2;
    double f_min_hz = 0.01;
    double f_max_hz = 20.0;
    int points = 30;
    double amplitude_rad = 0.1;
    double sample_rate_hz = 1000.0;
    double periods = 2.5;        // synthetic sweeps: record length in periods
    double min_duration_s = 10;  // ... but never shorter than this
  } ident;

  struct Filter {
    int order = 2;
    double cutoff_hz = 5.0;
  } filter;

  struct Impedance {
    ImpedanceBounds bounds;
    double k_pinned = 17000.0;
  } impedance;

  struct Grid {
    double m_min = 0.1, m_max = 100.0;
    int m_count = 60;
    bool m_log = true;
    double b_min = 1.0, b_max = 2000.0;
    int b_count = 200;
    bool b_log = false;
  } grid;

  struct Transparency {
    int weight_order = 5;
    double weight_cutoff_hz = 5.0;
    double f_min_hz = 0.01;
    double f_max_hz = 30.0;
    int points = 100;
  } transparency;

  struct Oracle {
    double dt = 1e-3;
    double duration = 20.0;
    double pulse_amplitude = 10.0;
    double pulse_width = 0.5;
  } oracle;

  double stability_margin = 0.0;

  static ToolkitConfig defaults() { return {}; }
  /// Reads an INI file; relative paths resolve against the file's directory.
  static ToolkitConfig load(const std::filesystem::path& path);
  /// Applies ADMITFORGE_* overrides on top of defaults (used without a file).
  static ToolkitConfig from_environment();

  ParameterGrid parameter_grid() const;
  TransparencySpec transparency_spec() const;
  TransferFunction force_filter() const;
  SimOptions sim_options() const;
  std::vector<ImpedanceParams> corners(double k_eq) const;
  std::vector<double> ident_frequencies() const;
};

/// Reads a transfer function file: optional '#' comment lines, then one
/// `num: ... / den: ...` line.
TransferFunction read_tf_file(const std::filesystem::path& path);
void write_tf_file(const std::filesystem::path& path, const TransferFunction& tf, const std::string& comment = {});

/// Parses whitespace-separated reals; tokens may also be of the form
/// [-][a*]pi[/c] (e.g. "5*pi/12").
std::vector<double> parse_real_list(const std::string& text);

}  // namespace admitforge::cli
