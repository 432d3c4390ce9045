#include "admitforge/cli/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "admitforge/error.hpp"

namespace admitforge::cli {

namespace {

namespace pt = boost::property_tree;

double parse_real(const std::string& token) {
  std::string s = token;
  double sign = 1.0;
  if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
    if (s[0] == '-') sign = -1.0;
    s.erase(0, 1);
  }
  const auto pi_at = s.find("pi");
  try {
    if (pi_at == std::string::npos) {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return sign * v;
    }
    double factor = 1.0;
    if (pi_at > 0) {
      const std::string head = s.substr(0, pi_at);
      if (head.back() != '*') throw std::invalid_argument(s);
      factor = std::stod(head.substr(0, head.size() - 1));
    }
    double divisor = 1.0;
    const std::string tail = s.substr(pi_at + 2);
    if (!tail.empty()) {
      if (tail[0] != '/') throw std::invalid_argument(s);
      divisor = std::stod(tail.substr(1));
    }
    return sign * factor * std::numbers::pi / divisor;
  } catch (const std::exception&) {
    throw ConfigError(fmt::format("'{}' is not a real number", token));
  }
}

std::string env_name(const std::string& section, const std::string& key) {
  std::string name = "ADMITFORGE_" + section + "_" + key;
  std::transform(name.begin(), name.end(), name.begin(), [](unsigned char c) { return std::toupper(c); });
  return name;
}

// Key lookup with environment override.
class Source {
 public:
  Source(pt::ptree tree, std::filesystem::path base) : tree_(std::move(tree)), base_(std::move(base)) {}

  std::optional<std::string> raw(const std::string& section, const std::string& key) const {
    if (const char* env = std::getenv(env_name(section, key).c_str())) return std::string(env);
    if (auto v = tree_.get_optional<std::string>(pt::ptree::path_type(section + "." + key, '.'))) return *v;
    return std::nullopt;
  }

  void real(const std::string& section, const std::string& key, double& out) const {
    if (auto v = raw(section, key)) out = parse_real(*v);
  }
  void integer(const std::string& section, const std::string& key, int& out) const {
    if (auto v = raw(section, key)) {
      const double d = parse_real(*v);
      if (d != static_cast<int>(d)) throw ConfigError(fmt::format("{}.{} must be an integer", section, key));
      out = static_cast<int>(d);
    }
  }
  void text(const std::string& section, const std::string& key, std::string& out) const {
    if (auto v = raw(section, key)) out = *v;
  }
  void spacing(const std::string& section, const std::string& key, bool& log) const {
    if (auto v = raw(section, key)) {
      if (*v == "log") log = true;
      else if (*v == "linear") log = false;
      else throw ConfigError(fmt::format("{}.{} must be 'log' or 'linear'", section, key));
    }
  }
  std::optional<std::filesystem::path> file(const std::string& section, const std::string& key) const {
    auto v = raw(section, key);
    if (!v || v->empty()) return std::nullopt;
    std::filesystem::path p(*v);
    if (p.is_relative()) p = base_ / p;
    if (!std::filesystem::exists(p)) {
      throw ConfigError(fmt::format("{}.{}: file {} does not exist", section, key, p.string()));
    }
    return p;
  }

 private:
  pt::ptree tree_;
  std::filesystem::path base_;
};

template <std::size_t N>
std::array<double, N> fixed_list(const std::string& text, const std::string& what) {
  const auto values = parse_real_list(text);
  if (values.size() != N) throw ConfigError(fmt::format("{} needs {} values, got {}", what, N, values.size()));
  std::array<double, N> out{};
  std::copy(values.begin(), values.end(), out.begin());
  return out;
}

ToolkitConfig build(const Source& src) {
  ToolkitConfig c;
  auto& r = c.robot;
  r.dh_table = src.file("robot", "dh_table");
  if (auto v = src.raw("robot", "joint_limits_upper")) {
    const auto up = fixed_list<kNumJoints>(*v, "robot.joint_limits_upper");
    for (int i = 0; i < kNumJoints; ++i) r.limits.upper(i) = up[static_cast<std::size_t>(i)];
    r.limits.lower = -r.limits.upper;
  }
  if (auto v = src.raw("robot", "joint_limits_lower")) {
    const auto lo = fixed_list<kNumJoints>(*v, "robot.joint_limits_lower");
    for (int i = 0; i < kNumJoints; ++i) r.limits.lower(i) = lo[static_cast<std::size_t>(i)];
  }
  if (auto v = src.raw("robot", "theta_nom")) {
    const auto q = fixed_list<kNumJoints>(*v, "robot.theta_nom");
    for (int i = 0; i < kNumJoints; ++i) r.theta_nom(i) = q[static_cast<std::size_t>(i)];
  }
  src.text("robot", "joint_models", r.joint_models);
  if (r.joint_models != "iiwa" && r.joint_models != "identity" && r.joint_models != "files") {
    throw ConfigError("robot.joint_models must be 'iiwa', 'identity' or 'files'");
  }
  for (int i = 0; i < kNumJoints; ++i) {
    r.joint_tf[static_cast<std::size_t>(i)] = src.file("robot", fmt::format("joint{}_tf", i + 1));
  }
  r.model_tf = src.file("robot", "model_tf");
  src.text("robot", "row_axis", r.row_axis);
  src.text("robot", "col_axis", r.col_axis);
  parse_axis(r.row_axis);
  parse_axis(r.col_axis);
  if (auto v = src.raw("robot", "reference_weights")) {
    r.reference_weights = fixed_list<kNumJoints>(*v, "robot.reference_weights");
  }
  src.real("robot", "reference_tolerance", r.reference_tolerance);

  auto& id = c.ident;
  src.integer("ident", "num_order", id.num_order);
  src.integer("ident", "den_order", id.den_order);
  src.real("ident", "f_min_hz", id.f_min_hz);
  src.real("ident", "f_max_hz", id.f_max_hz);
  src.integer("ident", "points", id.points);
  src.real("ident", "amplitude_rad", id.amplitude_rad);
  src.real("ident", "sample_rate_hz", id.sample_rate_hz);
  src.real("ident", "periods", id.periods);
  src.real("ident", "min_duration_s", id.min_duration_s);
  if (id.num_order < 0 || id.den_order < id.num_order) throw ConfigError("ident orders need 0 <= num <= den");
  if (id.points < 1 || !(id.f_min_hz > 0.0) || !(id.f_max_hz >= id.f_min_hz)) {
    throw ConfigError("ident frequency range is invalid");
  }

  src.integer("filter", "order", c.filter.order);
  src.real("filter", "cutoff_hz", c.filter.cutoff_hz);
  if (c.filter.order < 1 || c.filter.order > 10 || !(c.filter.cutoff_hz > 0.0)) {
    throw ConfigError("filter needs order in 1..10 and a positive cutoff");
  }

  auto& b = c.impedance.bounds;
  src.real("impedance", "m_lo", b.m_lo);
  src.real("impedance", "m_hi", b.m_hi);
  src.real("impedance", "b_lo", b.b_lo);
  src.real("impedance", "b_hi", b.b_hi);
  src.real("impedance", "k_lo", b.k_lo);
  src.real("impedance", "k_hi", b.k_hi);
  src.real("impedance", "k_pinned", c.impedance.k_pinned);
  b.validate();
  if (!(c.impedance.k_pinned >= 0.0)) throw ConfigError("impedance.k_pinned must be non-negative");

  auto& g = c.grid;
  src.real("grid", "m_min", g.m_min);
  src.real("grid", "m_max", g.m_max);
  src.integer("grid", "m_count", g.m_count);
  src.spacing("grid", "m_spacing", g.m_log);
  src.real("grid", "b_min", g.b_min);
  src.real("grid", "b_max", g.b_max);
  src.integer("grid", "b_count", g.b_count);
  src.spacing("grid", "b_spacing", g.b_log);
  if (g.m_count < 1 || g.b_count < 1 || !(g.m_min > 0.0) || !(g.b_min > 0.0) || !(g.m_max >= g.m_min) ||
      !(g.b_max >= g.b_min)) {
    throw ConfigError("grid ranges must be positive with min <= max and counts >= 1");
  }

  auto& t = c.transparency;
  src.integer("transparency", "weight_order", t.weight_order);
  src.real("transparency", "weight_cutoff_hz", t.weight_cutoff_hz);
  src.real("transparency", "f_min_hz", t.f_min_hz);
  src.real("transparency", "f_max_hz", t.f_max_hz);
  src.integer("transparency", "points", t.points);
  if (t.points < 1 || !(t.f_min_hz > 0.0) || !(t.f_max_hz >= t.f_min_hz)) {
    throw ConfigError("transparency frequency range is invalid");
  }

  auto& o = c.oracle;
  src.real("oracle", "dt", o.dt);
  src.real("oracle", "duration", o.duration);
  src.real("oracle", "pulse_amplitude", o.pulse_amplitude);
  src.real("oracle", "pulse_width", o.pulse_width);
  if (!(o.dt > 0.0) || !(o.duration >= 5.0)) throw ConfigError("oracle needs dt > 0 and duration >= 5 s");

  src.real("stability", "margin", c.stability_margin);
  if (!(c.stability_margin >= 0.0)) throw ConfigError("stability.margin must be non-negative");
  return c;
}

}  // namespace

std::vector<double> parse_real_list(const std::string& text) {
  std::istringstream in(text);
  std::vector<double> out;
  std::string token;
  while (in >> token) out.push_back(parse_real(token));
  return out;
}

ToolkitConfig ToolkitConfig::load(const std::filesystem::path& path) {
  pt::ptree tree;
  try {
    pt::read_ini(path.string(), tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(fmt::format("cannot read config: {}", e.what()));
  }
  return build(Source(std::move(tree), path.parent_path()));
}

ToolkitConfig ToolkitConfig::from_environment() { return build(Source({}, std::filesystem::current_path())); }

ParameterGrid ToolkitConfig::parameter_grid() const {
  ParameterGrid g{grid.m_log ? logspace(grid.m_min, grid.m_max, grid.m_count)
                             : linspace(grid.m_min, grid.m_max, grid.m_count),
                  grid.b_log ? logspace(grid.b_min, grid.b_max, grid.b_count)
                             : linspace(grid.b_min, grid.b_max, grid.b_count)};
  g.validate();
  return g;
}

TransparencySpec ToolkitConfig::transparency_spec() const {
  const double two_pi = 2.0 * std::numbers::pi;
  TransparencySpec spec{butterworth(transparency.weight_order, transparency.weight_cutoff_hz),
                        FrequencyGrid::logarithmic(two_pi * transparency.f_min_hz, two_pi * transparency.f_max_hz,
                                                   transparency.points),
                        {0.0, 0.0, impedance.k_pinned},
                        fmt::format("butterworth order {} cutoff {} Hz", transparency.weight_order,
                                    transparency.weight_cutoff_hz)};
  spec.validate();
  return spec;
}

TransferFunction ToolkitConfig::force_filter() const { return butterworth(filter.order, filter.cutoff_hz); }

SimOptions ToolkitConfig::sim_options() const {
  SimOptions o;
  o.dt = oracle.dt;
  o.duration = oracle.duration;
  return o;
}

std::vector<ImpedanceParams> ToolkitConfig::corners(double k_eq) const {
  return corner_set(impedance.bounds, {true, true, false}, {0.0, 0.0, k_eq});
}

std::vector<double> ToolkitConfig::ident_frequencies() const {
  return logspace(ident.f_min_hz, ident.f_max_hz, ident.points);
}

TransferFunction read_tf_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open transfer function file {}", path.string()));
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    try {
      return TransferFunction::parse(line);
    } catch (const ConfigError& e) {
      throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
    }
  }
  throw ConfigError(fmt::format("{}: no transfer function line", path.string()));
}

void write_tf_file(const std::filesystem::path& path, const TransferFunction& tf, const std::string& comment) {
  std::ofstream out(path);
  if (!out) throw ConfigError(fmt::format("cannot write {}", path.string()));
  if (!comment.empty()) {
    std::istringstream lines(comment);
    std::string l;
    while (std::getline(lines, l)) out << "# " << l << '\n';
  }
  out << tf.to_string() << '\n';
}

}  // namespace admitforge::cli
