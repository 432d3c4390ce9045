#include "admitforge/design.hpp"

#include <cmath>
#include <limits>
#include <map>

#include <fmt/format.h>

#include "admitforge/csv.hpp"
#include "admitforge/error.hpp"

namespace admitforge {

std::size_t AllowableRegion::allowed_count() const {
  return static_cast<std::size_t>(std::count(allowed.begin(), allowed.end(), true));
}

void AllowableRegion::save_csv(const std::filesystem::path& path) const {
  std::vector<std::vector<double>> rows;
  rows.reserve(grid.size());
  for (std::size_t cell = 0; cell < grid.size(); ++cell) {
    const auto p = grid.at(cell);
    rows.push_back({p.m, p.b, allowed[cell] ? 1.0 : 0.0,
                    cost[cell].value_or(std::numeric_limits<double>::quiet_NaN())});
  }
  write_csv(path, {}, {"m", "b", "allowed", "cost"}, rows);
}

AllowableRegion AllowableRegion::load_csv(const std::filesystem::path& path) {
  const CsvTable csv = read_csv(path);
  csv.require_columns({"m", "b", "allowed", "cost"});
  std::map<std::pair<double, double>, std::pair<bool, double>> cells;
  std::vector<double> ms;
  std::vector<double> bs;
  for (std::size_t r = 0; r < csv.rows(); ++r) {
    const double m = csv.at(r, "m");
    const double b = csv.at(r, "b");
    cells[{m, b}] = {csv.at(r, "allowed") != 0.0, csv.at(r, "cost")};
    ms.push_back(m);
    bs.push_back(b);
  }
  AllowableRegion region;
  region.grid = ParameterGrid{ms, bs}.with_points({});
  region.grid.validate();
  if (cells.size() != region.grid.size()) {
    throw ConfigError(fmt::format("{}: rows do not form a complete m x b grid", path.string()));
  }
  for (std::size_t cell = 0; cell < region.grid.size(); ++cell) {
    const auto p = region.grid.at(cell);
    const auto it = cells.find({p.m, p.b});
    if (it == cells.end()) throw ConfigError(fmt::format("{}: missing cell ({}, {})", path.string(), p.m, p.b));
    const auto [ok, c] = it->second;
    region.allowed.push_back(ok && std::isfinite(c));
    region.cost.push_back(region.allowed.back() ? std::optional<double>(c) : std::nullopt);
  }
  return region;
}

AllowableRegion superimpose(const StabilityMap& stability, const CostMap& cost) {
  if (!(stability.grid == cost.grid)) throw Error("stability and cost maps are on different grids");
  AllowableRegion region;
  region.grid = stability.grid;
  region.allowed.resize(region.grid.size());
  region.cost.resize(region.grid.size());
  for (std::size_t cell = 0; cell < region.grid.size(); ++cell) {
    const bool ok = stability.robust[cell] && cost.cost[cell].has_value();
    region.allowed[cell] = ok;
    if (ok) region.cost[cell] = cost.cost[cell];
  }
  return region;
}

namespace {

bool margin_box_allowed(const AllowableRegion& region, std::size_t im, std::size_t ib, double delta_b,
                        double delta_m) {
  const auto& g = region.grid;
  const double m = g.m[im];
  const double b = g.b[ib];
  if (b - delta_b < g.b.front() || m + delta_m > g.m.back()) return false;
  for (std::size_t jm = im; jm < g.m.size() && g.m[jm] <= m + delta_m; ++jm) {
    for (std::size_t jb = ib + 1; jb-- > 0 && g.b[jb] >= b - delta_b;) {
      if (!region.allowed[g.index(jm, jb)]) return false;
    }
  }
  return true;
}

}  // namespace

AdmittanceParams select(const AllowableRegion& region, const SelectionPolicy& policy) {
  const auto& g = region.grid;
  std::optional<std::size_t> best;
  for (std::size_t im = 0; im < g.m.size(); ++im) {
    for (std::size_t ib = 0; ib < g.b.size(); ++ib) {
      const std::size_t cell = g.index(im, ib);
      if (!region.allowed[cell]) continue;
      if (policy.kind == SelectionPolicy::Kind::kMinCostWithMargin &&
          !margin_box_allowed(region, im, ib, policy.delta_b, policy.delta_m)) {
        continue;
      }
      if (!best) {
        best = cell;
        continue;
      }
      const double c = *region.cost[cell];
      const double cb = *region.cost[*best];
      const auto p = g.at(cell);
      const auto q = g.at(*best);
      if (c < cb || (c == cb && (p.b < q.b || (p.b == q.b && p.m < q.m)))) best = cell;
    }
  }
  if (!best) {
    throw Error(policy.kind == SelectionPolicy::Kind::kMinCost ? "allowable region is empty"
                                                               : "no allowable cell satisfies the selection margin");
  }
  return g.at(*best);
}

}  // namespace admitforge
