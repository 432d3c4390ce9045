#include "admitforge/transparency.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>

#include "admitforge/csv.hpp"
#include "admitforge/error.hpp"
#include "admitforge/parallel.hpp"

namespace admitforge {

namespace {

constexpr double kVanishingLoopGain = 1e-14;

std::complex<double> loop_gain(const TransferFunction& robot, const TransferFunction& controller,
                               const TransferFunction& filter, double omega) {
  const std::complex<double> gyh =
      freq_response(robot, omega) * freq_response(controller, omega) * freq_response(filter, omega);
  if (std::abs(gyh) < kVanishingLoopGain) throw Error(fmt::format("loop gain vanishes at {} rad/s", omega));
  return gyh;
}

}  // namespace

TransparencySpec TransparencySpec::defaults() {
  const double two_pi = 2.0 * std::numbers::pi;
  TransparencySpec spec{butterworth(5, 5.0), FrequencyGrid::logarithmic(two_pi * 0.01, two_pi * 30.0, 100),
                        {}, "butterworth order 5 cutoff 5 Hz"};
  return spec;
}

void TransparencySpec::validate() const {
  if (grid.points.empty()) throw ConfigError("transparency frequency grid is empty");
  for (std::size_t i = 0; i < grid.points.size(); ++i) {
    if (!(grid.points[i] > 0.0) || (i > 0 && !(grid.points[i] > grid.points[i - 1]))) {
      throw ConfigError("transparency frequencies must be positive and strictly increasing");
    }
  }
  if (std::abs(std::abs(freq_response(weight, 0.0)) - 1.0) > 1e-12) {
    throw ConfigError("transparency weight must have unit DC gain");
  }
}

std::complex<double> displayed_impedance(const TransferFunction& robot, const TransferFunction& controller,
                                         const TransferFunction& filter, const TransferFunction& environment,
                                         double omega) {
  const std::complex<double> gyh = loop_gain(robot, controller, filter, omega);
  return (1.0 + gyh * freq_response(environment, omega)) / gyh;
}

double parasitic_magnitude(const TransferFunction& robot, const TransferFunction& controller,
                           const TransferFunction& filter, double omega) {
  return 1.0 / std::abs(loop_gain(robot, controller, filter, omega));
}

double transparency_cost(const TransferFunction& robot, const TransferFunction& filter,
                         const TransferFunction& controller, const TransparencySpec& spec) {
  double cost = 0.0;
  for (double w : spec.grid.points) {
    const double weight = std::abs(freq_response(spec.weight, w));
    cost += weight * std::log10(parasitic_magnitude(robot, controller, filter, w));
  }
  return cost;
}

void CostMap::save_csv(const std::filesystem::path& path) const {
  std::vector<std::vector<double>> rows;
  rows.reserve(grid.size());
  for (std::size_t cell = 0; cell < grid.size(); ++cell) {
    const auto p = grid.at(cell);
    rows.push_back({p.m, p.b, cost[cell].value_or(std::numeric_limits<double>::quiet_NaN())});
  }
  std::vector<std::string> comments{
      fmt::format("weight: {}", spec_description),
      fmt::format("grid: m {} values [{:.17g}, {:.17g}], b {} values [{:.17g}, {:.17g}]", grid.m.size(),
                  grid.m.front(), grid.m.back(), grid.b.size(), grid.b.front(), grid.b.back()),
      "log_base: 10"};
  write_csv(path, comments, {"m", "b", "cost"}, rows);
}

CostMap cost_map(const TransferFunction& robot, const TransferFunction& filter, const ParameterGrid& grid,
                 const TransparencySpec& spec, unsigned threads) {
  grid.validate();
  CostMap map;
  map.grid = grid;
  map.cost.assign(grid.size(), std::nullopt);
  map.errors.assign(grid.size(), std::string());
  map.spec_description = fmt::format("{}; {} points over [{:.17g}, {:.17g}] rad/s", spec.weight_description,
                                     spec.grid.points.size(), spec.grid.lower(), spec.grid.upper());
  parallel_for(grid.size(), threads, [&](std::size_t cell) {
    try {
      map.cost[cell] = transparency_cost(robot, filter, admittance_tf(grid.at(cell)), spec);
    } catch (const Error& e) {
      map.errors[cell] = e.what();
    }
  });
  return map;
}

}  // namespace admitforge
