#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "admitforge/impedance.hpp"
#include "admitforge/transfer_function.hpp"

namespace admitforge {

/// The coupled loop G Y / (1 + G Y H Zeq).
struct LoopModel {
  TransferFunction robot;       // G
  TransferFunction filter;      // H
  TransferFunction controller;  // Y
  TransferFunction impedance;   // Zeq, denominator exactly s
};

/// D_G D_Y D_H D_Z + N_G N_Y N_H N_Z, without cancellation.
Polynomial char_poly(const LoopModel& model);

/// Strict-LHP verdict of one (controller, impedance) pair. When Zeq is
/// identically zero the loop is open and the open-loop path D_G D_Y D_H is
/// tested; the origin factor of a zero impedance is not a loop mode.
bool loop_is_stable(const LoopModel& model, double margin = 0.0);

enum class CellVerdict : unsigned char { kUnstable = 0, kStable = 1, kError = 2 };

struct RobustVerdict {
  bool robust = false;
  std::vector<CellVerdict> per_corner;
};

/// Stable under every corner; a corner that fails to evaluate counts as unstable.
RobustVerdict robust_verdict(const TransferFunction& robot, const TransferFunction& filter,
                             const AdmittanceParams& controller,
                             const std::vector<ImpedanceParams>& corners, double margin = 0.0);

/// Admittance-parameter grid; cells are indexed m-major: cell(i_m, i_b).
struct ParameterGrid {
  std::vector<double> m;  // kg, strictly increasing, positive
  std::vector<double> b;  // Ns/m, strictly increasing, positive

  void validate() const;
  std::size_t size() const { return m.size() * b.size(); }
  std::size_t index(std::size_t im, std::size_t ib) const { return im * b.size() + ib; }
  AdmittanceParams at(std::size_t cell) const { return {m[cell / b.size()], b[cell % b.size()]}; }

  /// 60 log-spaced m in [0.1, 100] kg by 200 linear b in [1, 2000] Ns/m.
  static ParameterGrid defaults();
  /// Adds extra (m, b) values to the axes, keeping them sorted and unique.
  ParameterGrid with_points(const std::vector<AdmittanceParams>& extra) const;

  friend bool operator==(const ParameterGrid&, const ParameterGrid&) = default;
};

struct StabilityMap {
  ParameterGrid grid;
  std::vector<ImpedanceParams> corners;
  double k_eq = 0.0;
  double margin = 0.0;
  // cell-major: verdicts[cell * corners.size() + corner]
  std::vector<CellVerdict> verdicts;
  std::vector<bool> robust;

  CellVerdict verdict(std::size_t cell, std::size_t corner) const {
    return verdicts[cell * corners.size() + corner];
  }
  std::size_t robust_count() const;

  /// CSV `m,b,corner_0..corner_{n-1},robust`; errors are written as -1.
  void save_csv(const std::filesystem::path& path) const;
};

StabilityMap stability_map(const TransferFunction& robot, const TransferFunction& filter,
                           const ParameterGrid& grid, const std::vector<ImpedanceParams>& corners,
                           double margin = 0.0, unsigned threads = 1);

struct BoundaryPoint {
  double m = 0.0;
  double b = 0.0;
};

/// For each corner, for each m column, the smallest b with a stable verdict
/// (columns with none are omitted). Outer index: corner.
std::vector<std::vector<BoundaryPoint>> boundary_trace(const StabilityMap& map);

/// Cells stable at every corner with damping `b_low` but unstable at some
/// corner with damping `b_high` (other components equal).
std::vector<AdmittanceParams> damping_destabilized_cells(const StabilityMap& map, double b_low,
                                                         double b_high);

/// Largest real part over the roots of the loop polynomial used by loop_is_stable.
double max_pole_real_part(const LoopModel& model);

}  // namespace admitforge
