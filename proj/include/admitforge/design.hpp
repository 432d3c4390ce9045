#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "admitforge/impedance.hpp"
#include "admitforge/loop_analysis.hpp"
#include "admitforge/transparency.hpp"

namespace admitforge {

/// Robustly stable cells of a stability map, annotated with transparency cost.
struct AllowableRegion {
  ParameterGrid grid;
  std::vector<bool> allowed;
  std::vector<std::optional<double>> cost;  // present iff allowed
  std::size_t allowed_count() const;

  /// CSV `m,b,allowed,cost` (cost nan where not allowed).
  void save_csv(const std::filesystem::path& path) const;
  static AllowableRegion load_csv(const std::filesystem::path& path);
};

/// allowed = robust verdict; a robust cell whose cost failed to evaluate is
/// not allowed. Throws on grid mismatch.
AllowableRegion superimpose(const StabilityMap& stability, const CostMap& cost);

struct SelectionPolicy {
  enum class Kind { kMinCost, kMinCostWithMargin };
  Kind kind = Kind::kMinCost;
  // For kMinCostWithMargin: every grid cell with b' in [b - delta_b, b] and
  // m' in [m, m + delta_m] must be allowed, and that box must lie inside the grid.
  double delta_b = 0.0;
  double delta_m = 0.0;
};

/// Allowed cell of least cost; ties go to smaller b, then smaller m.
AdmittanceParams select(const AllowableRegion& region, const SelectionPolicy& policy = {});

}  // namespace admitforge
