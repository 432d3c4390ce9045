#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "admitforge/cli/config.hpp"
#include "admitforge/design.hpp"
#include "admitforge/robot_ident.hpp"

namespace admitforge::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitComputation = 2;

struct Context {
  ToolkitConfig config;
  std::filesystem::path out_dir = ".";
  unsigned threads = 0;  // 0: hardware concurrency
};

/// G(s) and its joint weights as configured (model_tf, joint files, or built-ins).
CartesianModel robot_model(const ToolkitConfig& config);

struct IdentifiedJoint {
  int joint_index = 0;
  FrfDataset frf;
  FitResult fit;
};

/// Extracts one FRF per joint from joint<i>_f<Hz>.csv logs in `sweep_dir`, fits
/// each, and writes joint<i>.tf, joint<i>_frf.csv and joint<i>_fit.csv.
std::vector<IdentifiedJoint> identify(const Context& ctx, const std::filesystem::path& sweep_dir,
                                      std::ostream& log);

struct Characterization {
  CartesianModel model;
  std::optional<double> phase_margin_deg;
  bool dh_discrepancy = false;
};

/// Writes G.tf and weights.csv; with reference weights configured, also
/// dh_discrepancy.txt whenever any weight is off by more than the tolerance.
Characterization characterize(const Context& ctx, std::ostream& log);

enum class MapKind { kStability, kTransparency, kAllowable };
MapKind parse_map_kind(const std::string& name);

struct MapOutputs {
  std::optional<StabilityMap> stability;
  std::optional<CostMap> cost;
  std::optional<AllowableRegion> allowable;
  std::vector<AdmittanceParams> damping_destabilized;
};

/// Stability maps use the corners at k_eq (default impedance.k_pinned).
MapOutputs map(const Context& ctx, MapKind kind, std::optional<double> k_eq, bool gnuplot, std::ostream& log);

struct SimulationRequest {
  AdmittanceParams controller;
  // Corner index into the corner set at k_eq, or the worst corner when absent.
  std::optional<std::size_t> corner;
  std::optional<ImpedanceParams> impedance;  // overrides the corner choice
  std::optional<double> k_eq;
  std::string profile = "pulse";  // pulse, step, zero, or a CSV path
};

struct SimulationOutcome {
  ImpedanceParams impedance;
  SimResult result;
  OracleVerdict verdict = OracleVerdict::kStable;
  bool analytic_stable = false;
};

SimulationOutcome simulate(const Context& ctx, const SimulationRequest& request, std::ostream& log);

/// Selects a controller from `region_csv` (or a freshly computed allowable
/// region) and writes controller_preset.ini.
AdmittanceParams select_controller(const Context& ctx, const SelectionPolicy& policy,
                                   const std::optional<std::filesystem::path>& region_csv, std::ostream& log);

/// Writes synthetic sweep logs for the given joints (1-based), driving each
/// configured joint model with the ident excitation. Returns the files written.
std::vector<std::filesystem::path> synthesize_sweeps(const Context& ctx, const std::vector<int>& joints,
                                                     std::ostream& log);

/// Full command-line entry point; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace admitforge::cli
