#include "admitforge/loop_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "admitforge/csv.hpp"
#include "admitforge/error.hpp"
#include "admitforge/parallel.hpp"

namespace admitforge {

namespace {

Polynomial open_path_poly(const LoopModel& model) {
  return model.robot.den() * model.controller.den() * model.filter.den();
}

// The polynomial whose roots decide stability (see loop_is_stable).
Polynomial verdict_poly(const LoopModel& model) {
  if (model.impedance.num().is_zero()) {
    Polynomial p = open_path_poly(model);
    if (p.degree() < 1) throw Error("degenerate loop");
    return p;
  }
  return char_poly(model);
}

}  // namespace

Polynomial char_poly(const LoopModel& model) {
  if (!(model.impedance.den() == Polynomial::s())) {
    throw Error("equivalent impedance must have exactly one pole at the origin (denominator s)");
  }
  Polynomial p = open_path_poly(model) * model.impedance.den() +
                 model.robot.num() * model.controller.num() * model.filter.num() * model.impedance.num();
  if (p.is_zero() || p.degree() < 1) throw Error("degenerate loop");
  return p;
}

bool loop_is_stable(const LoopModel& model, double margin) { return is_hurwitz(verdict_poly(model), margin); }

double max_pole_real_part(const LoopModel& model) {
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& r : poly_roots(verdict_poly(model))) worst = std::max(worst, r.real());
  return worst;
}

RobustVerdict robust_verdict(const TransferFunction& robot, const TransferFunction& filter,
                             const AdmittanceParams& controller,
                             const std::vector<ImpedanceParams>& corners, double margin) {
  if (corners.empty()) throw Error("robust verdict needs at least one impedance corner");
  RobustVerdict out;
  out.robust = true;
  const TransferFunction y = admittance_tf(controller);
  for (const auto& corner : corners) {
    CellVerdict v = CellVerdict::kError;
    try {
      const LoopModel model{robot, filter, y, impedance_tf_allow_zero(corner)};
      v = loop_is_stable(model, margin) ? CellVerdict::kStable : CellVerdict::kUnstable;
    } catch (const Error&) {
      v = CellVerdict::kError;
    }
    out.per_corner.push_back(v);
    if (v != CellVerdict::kStable) out.robust = false;
  }
  return out;
}

void ParameterGrid::validate() const {
  if (m.empty() || b.empty()) throw Error("parameter grid is empty");
  auto check = [](const std::vector<double>& axis, const char* name) {
    for (std::size_t i = 0; i < axis.size(); ++i) {
      if (!(axis[i] > 0.0)) throw Error(fmt::format("grid {} values must be positive", name));
      if (i > 0 && !(axis[i] > axis[i - 1])) throw Error(fmt::format("grid {} values must be strictly increasing", name));
    }
  };
  check(m, "m");
  check(b, "b");
}

ParameterGrid ParameterGrid::defaults() { return {logspace(0.1, 100.0, 60), linspace(1.0, 2000.0, 200)}; }

ParameterGrid ParameterGrid::with_points(const std::vector<AdmittanceParams>& extra) const {
  ParameterGrid g = *this;
  for (const auto& p : extra) {
    g.m.push_back(p.m);
    g.b.push_back(p.b);
  }
  for (auto* axis : {&g.m, &g.b}) {
    std::sort(axis->begin(), axis->end());
    axis->erase(std::unique(axis->begin(), axis->end()), axis->end());
  }
  return g;
}

std::size_t StabilityMap::robust_count() const {
  return static_cast<std::size_t>(std::count(robust.begin(), robust.end(), true));
}

void StabilityMap::save_csv(const std::filesystem::path& path) const {
  std::vector<std::string> comments;
  comments.push_back(fmt::format("k_eq: {:.17g}", k_eq));
  comments.push_back(fmt::format("margin: {:.17g}", margin));
  comments.push_back(fmt::format("grid: m {} values [{:.17g}, {:.17g}], b {} values [{:.17g}, {:.17g}]",
                                 grid.m.size(), grid.m.front(), grid.m.back(), grid.b.size(), grid.b.front(),
                                 grid.b.back()));
  for (std::size_t c = 0; c < corners.size(); ++c) {
    comments.push_back(fmt::format("corner_{}: m_eq={:.17g} b_eq={:.17g} k_eq={:.17g}", c, corners[c].mass,
                                   corners[c].damping, corners[c].stiffness));
  }
  comments.push_back("verdicts: 1 stable, 0 unstable, -1 evaluation error");
  std::vector<std::string> header{"m", "b"};
  for (std::size_t c = 0; c < corners.size(); ++c) header.push_back(fmt::format("corner_{}", c));
  header.push_back("robust");
  std::vector<std::vector<double>> rows;
  rows.reserve(grid.size());
  for (std::size_t cell = 0; cell < grid.size(); ++cell) {
    const auto p = grid.at(cell);
    std::vector<double> row{p.m, p.b};
    for (std::size_t c = 0; c < corners.size(); ++c) {
      const CellVerdict v = verdict(cell, c);
      row.push_back(v == CellVerdict::kError ? -1.0 : static_cast<double>(v));
    }
    row.push_back(robust[cell] ? 1.0 : 0.0);
    rows.push_back(std::move(row));
  }
  write_csv(path, comments, header, rows);
}

StabilityMap stability_map(const TransferFunction& robot, const TransferFunction& filter,
                           const ParameterGrid& grid, const std::vector<ImpedanceParams>& corners,
                           double margin, unsigned threads) {
  grid.validate();
  if (corners.empty()) throw Error("stability map needs at least one impedance corner");
  StabilityMap map;
  map.grid = grid;
  map.corners = corners;
  map.k_eq = corners.front().stiffness;
  map.margin = margin;
  map.verdicts.assign(grid.size() * corners.size(), CellVerdict::kError);
  std::vector<unsigned char> robust(grid.size(), 0);
  parallel_for(grid.size(), threads, [&](std::size_t cell) {
    const RobustVerdict v = robust_verdict(robot, filter, grid.at(cell), corners, margin);
    std::copy(v.per_corner.begin(), v.per_corner.end(), map.verdicts.begin() + static_cast<std::ptrdiff_t>(cell * corners.size()));
    robust[cell] = v.robust ? 1 : 0;
  });
  map.robust.assign(robust.begin(), robust.end());
  return map;
}

std::vector<std::vector<BoundaryPoint>> boundary_trace(const StabilityMap& map) {
  std::vector<std::vector<BoundaryPoint>> out(map.corners.size());
  for (std::size_t c = 0; c < map.corners.size(); ++c) {
    for (std::size_t im = 0; im < map.grid.m.size(); ++im) {
      for (std::size_t ib = 0; ib < map.grid.b.size(); ++ib) {
        if (map.verdict(map.grid.index(im, ib), c) == CellVerdict::kStable) {
          out[c].push_back({map.grid.m[im], map.grid.b[ib]});
          break;
        }
      }
    }
  }
  return out;
}

std::vector<AdmittanceParams> damping_destabilized_cells(const StabilityMap& map, double b_low, double b_high) {
  // Pair each low-damping corner with its high-damping twin.
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t lo = 0; lo < map.corners.size(); ++lo) {
    if (map.corners[lo].damping != b_low) continue;
    for (std::size_t hi = 0; hi < map.corners.size(); ++hi) {
      if (map.corners[hi].damping == b_high && map.corners[hi].mass == map.corners[lo].mass &&
          map.corners[hi].stiffness == map.corners[lo].stiffness) {
        pairs.emplace_back(lo, hi);
      }
    }
  }
  std::vector<AdmittanceParams> cells;
  if (pairs.empty()) return cells;
  for (std::size_t cell = 0; cell < map.grid.size(); ++cell) {
    bool low_all_stable = true;
    bool high_any_unstable = false;
    for (const auto& [lo, hi] : pairs) {
      low_all_stable = low_all_stable && map.verdict(cell, lo) == CellVerdict::kStable;
      high_any_unstable = high_any_unstable || map.verdict(cell, hi) != CellVerdict::kStable;
    }
    if (low_all_stable && high_any_unstable) cells.push_back(map.grid.at(cell));
  }
  return cells;
}

}  // namespace admitforge
