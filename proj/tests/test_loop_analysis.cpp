#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <random>

#include "admitforge/csv.hpp"
#include "admitforge/error.hpp"
#include "admitforge/loop_analysis.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace admitforge;
using testing::iiwa_robot;
using testing::task_corners;
namespace fs = std::filesystem;

namespace {

const TransferFunction kOne = TransferFunction::gain(1.0);

LoopModel full_loop(AdmittanceParams y, ImpedanceParams z) {
  return {iiwa_robot(), default_force_filter(), admittance_tf(y), impedance_tf_allow_zero(z)};
}

std::size_t corner_index(const std::vector<ImpedanceParams>& corners, double m_eq, double b_eq) {
  for (std::size_t i = 0; i < corners.size(); ++i) {
    if (corners[i].mass == m_eq && corners[i].damping == b_eq) return i;
  }
  throw std::logic_error("corner not found");
}

}  // namespace

TEST_CASE("char_poly examples") {
  const LoopModel spring{kOne, kOne, admittance_tf({2.0, 3.0}), impedance_tf({0, 0, 5})};
  // Denominators are monic, so this is (m s^2 + b s + k) / m.
  const Polynomial p = 2.0 * char_poly(spring);
  CHECK(p.degree() == 2);
  CHECK(p.coefficient(2) == doctest::Approx(2.0));
  CHECK(p.coefficient(1) == doctest::Approx(3.0));
  CHECK(p.coefficient(0) == doctest::Approx(5.0));

  const LoopModel open{iiwa_robot(), default_force_filter(), admittance_tf({20, 900}), impedance_tf_allow_zero({})};
  CHECK(char_poly(open) == iiwa_robot().den() * admittance_tf({20, 900}).den() * default_force_filter().den() *
                               Polynomial::s());

  CHECK(loop_is_stable(full_loop({50, 780}, {5, 41, 17000})));
  CHECK_FALSE(loop_is_stable(full_loop({50, 780}, {0, 41, 17000})));
  CHECK(char_poly(full_loop({50, 780}, {5, 41, 17000})).degree() == 10);
}

TEST_CASE("char_poly errors") {
  LoopModel bad{kOne, kOne, admittance_tf({1, 1}), TransferFunction(Polynomial({1.0}), Polynomial({1.0, 1.0}))};
  CHECK_THROWS_AS(char_poly(bad), Error);
  const LoopModel cancel{TransferFunction::gain(-1.0), kOne, kOne,
                         TransferFunction(Polynomial({1.0, 0.0}), Polynomial::s())};
  CHECK_THROWS_WITH_AS(char_poly(cancel), "degenerate loop", Error);
}

TEST_CASE("spring loops are stable for all positive parameters") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.01, 1000.0);
  for (int trial = 0; trial < 200; ++trial) {
    const LoopModel m{kOne, kOne, admittance_tf({u(rng), u(rng)}), impedance_tf({0, 0, u(rng)})};
    CHECK(loop_is_stable(m));
  }
}

TEST_CASE("loop verdict agrees with Routh-Hurwitz on the full model") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> logm(-1.0, 2.0);
  std::uniform_real_distribution<double> b(1.0, 2000.0);
  int stable = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const AdmittanceParams y{std::pow(10.0, logm(rng)), b(rng)};
    for (const auto& z : task_corners(trial % 2 ? 17000.0 : 401.0)) {
      const LoopModel model = full_loop(y, z);
      const bool expected = z.mass == 0 && z.damping == 0 && z.stiffness == 0
                                ? true
                                : testing::routh_hurwitz_stable(char_poly(model));
      if (std::abs(max_pole_real_part(model)) < 1e-6) continue;
      stable += expected;
      CHECK(loop_is_stable(model) == expected);
    }
  }
  CHECK(stable > 50);
}

TEST_CASE("robust_verdict examples") {
  const auto h = default_force_filter();
  CHECK(robust_verdict(iiwa_robot(), h, {20, 1500}, task_corners(17000)).robust);
  const auto flip = robust_verdict(iiwa_robot(), h, {50, 780}, task_corners(17000));
  CHECK_FALSE(flip.robust);
  const auto corners = task_corners(17000);
  CHECK(flip.per_corner[corner_index(corners, 0, 41)] == CellVerdict::kUnstable);
  CHECK(flip.per_corner[corner_index(corners, 5, 41)] == CellVerdict::kStable);

  const std::vector<ImpedanceParams> soft_lo{{0, 0, 401}}, soft_hi{{0, 41, 401}};
  const std::vector<ImpedanceParams> heavy_lo{{5, 0, 401}};
  CHECK(robust_verdict(iiwa_robot(), h, {0.5, 17}, heavy_lo).robust);
  CHECK_FALSE(robust_verdict(iiwa_robot(), h, {0.5, 17}, soft_hi).robust);
  CHECK_THROWS_AS(robust_verdict(iiwa_robot(), h, {0.5, 17}, {}), Error);
}

TEST_CASE("robust_verdict records evaluation errors as failures") {
  const TransferFunction g(Polynomial({-1.0, -1.0}), Polynomial({1.0}));
  const auto v = robust_verdict(g, kOne, {1, 1}, {{0, 1, 0}, {0, 2, 0}});
  CHECK(v.per_corner[0] == CellVerdict::kError);
  CHECK_FALSE(v.robust);
}

TEST_CASE("parameter grid") {
  const auto g = ParameterGrid::defaults();
  CHECK(g.m.size() == 60);
  CHECK(g.b.size() == 200);
  CHECK(g.m.front() == doctest::Approx(0.1));
  CHECK(g.m.back() == doctest::Approx(100.0));
  CHECK(g.b.back() == doctest::Approx(2000.0));
  CHECK(g.at(g.index(3, 7)) == AdmittanceParams{g.m[3], g.b[7]});
  const auto with = g.with_points({{20, 1500}, {20, 900}, {50, 900}});
  CHECK(with.m.size() == 62);
  CHECK(with.b.size() == 202);
  CHECK_NOTHROW(with.validate());
  CHECK_THROWS_AS((ParameterGrid{{1.0, 1.0}, {1.0}}).validate(), Error);
  CHECK_THROWS_AS((ParameterGrid{{}, {1.0}}).validate(), Error);
  CHECK_THROWS_AS((ParameterGrid{{-1.0}, {1.0}}).validate(), Error);
}

TEST_CASE("stability_map examples") {
  const auto h = default_force_filter();
  const auto single = stability_map(iiwa_robot(), h, {{20}, {1500}}, task_corners(17000));
  CHECK(single.robust_count() == 1);

  ParameterGrid column{{0.5}, {}};
  for (int b = 1; b <= 60; ++b) column.b.push_back(b);
  const std::vector<ImpedanceParams> heavy_damping{{0, 41, 401}, {5, 41, 401}};
  const auto map = stability_map(iiwa_robot(), h, column, heavy_damping);
  std::optional<double> min_b;
  for (std::size_t cell = 0; cell < column.size(); ++cell) {
    if (map.robust[cell]) {
      min_b = column.at(cell).b;
      break;
    }
  }
  REQUIRE(min_b.has_value());
  CHECK(*min_b >= 21.0);
  CHECK(*min_b <= 25.0);

  const auto open = stability_map(iiwa_robot(), h, ParameterGrid{logspace(0.1, 100, 8), linspace(1, 2000, 8)},
                                  {ImpedanceParams{}});
  CHECK(open.robust_count() == open.grid.size());
}

TEST_CASE("map is deterministic across thread counts") {
  const ParameterGrid grid{logspace(0.1, 100, 12), linspace(1, 2000, 15)};
  const auto a = stability_map(iiwa_robot(), default_force_filter(), grid, task_corners(17000), 0.0, 1);
  const auto b = stability_map(iiwa_robot(), default_force_filter(), grid, task_corners(17000), 0.0, 4);
  CHECK(a.verdicts == b.verdicts);
  CHECK(a.robust == b.robust);
}

TEST_CASE("adding a corner only shrinks the robust region") {
  const ParameterGrid grid{logspace(0.1, 100, 15), linspace(1, 2000, 20)};
  auto corners = task_corners(17000);
  const auto three = std::vector<ImpedanceParams>(corners.begin(), corners.begin() + 3);
  const auto small = stability_map(iiwa_robot(), default_force_filter(), grid, three);
  const auto large = stability_map(iiwa_robot(), default_force_filter(), grid, corners);
  for (std::size_t cell = 0; cell < grid.size(); ++cell) {
    if (large.robust[cell]) CHECK(small.robust[cell]);
  }
  CHECK(large.robust_count() <= small.robust_count());
}

TEST_CASE("margin makes the verdict more conservative") {
  const ParameterGrid grid{logspace(0.1, 100, 10), linspace(1, 2000, 10)};
  const auto strict = stability_map(iiwa_robot(), default_force_filter(), grid, task_corners(17000), 0.0);
  const auto margined = stability_map(iiwa_robot(), default_force_filter(), grid, task_corners(17000), 1.0);
  for (std::size_t cell = 0; cell < grid.size(); ++cell) {
    if (margined.robust[cell]) CHECK(strict.robust[cell]);
  }
}

TEST_CASE("boundary_trace examples") {
  const ParameterGrid grid{{1.0, 2.0}, {10.0, 20.0}};
  const auto all_stable = stability_map(iiwa_robot(), default_force_filter(), grid, {ImpedanceParams{}});
  const auto trace = boundary_trace(all_stable);
  REQUIRE(trace.size() == 1);
  REQUIRE(trace[0].size() == 2);
  CHECK(trace[0][0].b == 10.0);
  CHECK(trace[0][1].b == 10.0);

  StabilityMap none = all_stable;
  std::fill(none.verdicts.begin(), none.verdicts.end(), CellVerdict::kUnstable);
  CHECK(boundary_trace(none)[0].empty());

  ParameterGrid col{{50.0}, {}};
  for (int b = 300; b <= 1400; b += 10) col.b.push_back(b);
  const auto corners = task_corners(17000);
  const auto map = stability_map(iiwa_robot(), default_force_filter(), col, corners);
  const auto t = boundary_trace(map);
  REQUIRE(!t[corner_index(corners, 5, 41)].empty());
  REQUIRE(!t[corner_index(corners, 0, 41)].empty());
  CHECK(t[corner_index(corners, 5, 41)][0].b < 780.0);
  CHECK(t[corner_index(corners, 0, 41)][0].b > 780.0);
}

TEST_CASE("damping-destabilized cells exist at low stiffness") {
  ParameterGrid grid{{0.5}, {}};
  for (int b = 1; b <= 40; ++b) grid.b.push_back(b);
  const auto map = stability_map(iiwa_robot(), default_force_filter(), grid, task_corners(401));
  const auto cells = damping_destabilized_cells(map, 0.0, 41.0);
  REQUIRE(!cells.empty());
  for (const auto& c : cells) {
    CHECK(c.b >= 17.0);
    CHECK(c.b <= 25.0);
    CHECK(loop_is_stable(full_loop(c, {0, 0, 401})));
    CHECK(loop_is_stable(full_loop(c, {5, 0, 401})));
    const bool both = loop_is_stable(full_loop(c, {0, 41, 401})) && loop_is_stable(full_loop(c, {5, 41, 401}));
    CHECK_FALSE(both);
  }
  CHECK(damping_destabilized_cells(map, 0.0, 99.0).empty());
}

TEST_CASE("stability map CSV") {
  const ParameterGrid grid{{1.0, 20.0}, {100.0, 1500.0}};
  const auto map = stability_map(iiwa_robot(), default_force_filter(), grid, task_corners(17000));
  const fs::path path = fs::temp_directory_path() / "admitforge_stability_test.csv";
  map.save_csv(path);
  const CsvTable csv = read_csv(path);
  CHECK(csv.header == std::vector<std::string>{"m", "b", "corner_0", "corner_1", "corner_2", "corner_3", "robust"});
  CHECK(csv.rows() == 4);
  for (std::size_t r = 0; r < csv.rows(); ++r) {
    CHECK(csv.at(r, "robust") == (map.robust[r] ? 1.0 : 0.0));
    CHECK(csv.at(r, "corner_1") == static_cast<double>(map.verdict(r, 1)));
  }
  CHECK(csv.comments.size() >= 6);
  fs::remove(path);
}
