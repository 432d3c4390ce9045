#pragma once

#include <complex>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "admitforge/impedance.hpp"
#include "admitforge/loop_analysis.hpp"
#include "admitforge/transfer_function.hpp"

namespace admitforge {

struct TransparencySpec {
  TransferFunction weight;  // only |W(j w)| is used
  FrequencyGrid grid;       // rad/s
  ImpedanceParams desired;  // Z_des; the cost never reads it (it cancels)
  std::string weight_description;

  /// 5th-order 5 Hz Butterworth weight, 100 log-spaced points over 0.01-30 Hz.
  static TransparencySpec defaults();
  /// Weight DC gain is 1 and the grid is positive and strictly increasing.
  void validate() const;
};

/// (1 + G Y H Ze) / (G Y H) at j omega.
std::complex<double> displayed_impedance(const TransferFunction& robot, const TransferFunction& controller,
                                         const TransferFunction& filter, const TransferFunction& environment,
                                         double omega);

/// |Delta Z(j omega)| = 1 / |G Y H|.
double parasitic_magnitude(const TransferFunction& robot, const TransferFunction& controller,
                           const TransferFunction& filter, double omega);

/// C = sum_k |W(j w_k)| log10 |Delta Z(j w_k)| over the TransparencySpec grid.
double transparency_cost(const TransferFunction& robot, const TransferFunction& filter,
                         const TransferFunction& controller, const TransparencySpec& spec);

struct CostMap {
  ParameterGrid grid;
  std::vector<std::optional<double>> cost;  // absent where evaluation failed
  std::vector<std::string> errors;          // empty string where it succeeded
  std::string spec_description;

  /// CSV `m,b,cost`; failed cells are written as nan.
  void save_csv(const std::filesystem::path& path) const;
};

CostMap cost_map(const TransferFunction& robot, const TransferFunction& filter, const ParameterGrid& grid,
                 const TransparencySpec& spec, unsigned threads = 1);

}  // namespace admitforge
