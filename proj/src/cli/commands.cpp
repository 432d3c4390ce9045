#include "admitforge/cli/commands.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "admitforge/csv.hpp"
#include "admitforge/error.hpp"
#include "admitforge/parallel.hpp"
#include "admitforge/presets.hpp"

namespace admitforge::cli {

namespace fs = std::filesystem;

namespace {

DiagonalJointTf joint_models(const ToolkitConfig& config) {
  const auto& r = config.robot;
  if (r.joint_models == "iiwa") return iiwa_joint_models();
  DiagonalJointTf joints;
  if (r.joint_models == "files") {
    for (std::size_t i = 0; i < joints.entries.size(); ++i) {
      if (r.joint_tf[i]) joints.entries[i] = read_tf_file(*r.joint_tf[i]);
    }
  }
  return joints;
}

void print(std::ostream& os, const std::string& text) { os << text << '\n'; }

std::string fmt_params(const AdmittanceParams& p) { return fmt::format("(m={:g}, b={:g})", p.m, p.b); }
std::string fmt_params(const ImpedanceParams& p) {
  return fmt::format("(m_eq={:g}, b_eq={:g}, k_eq={:g})", p.mass, p.damping, p.stiffness);
}

void write_gnuplot(const fs::path& path, const std::string& csv, const std::string& column, const std::string& title) {
  std::ofstream out(path);
  if (!out) throw ConfigError(fmt::format("cannot write {}", path.string()));
  out << "set datafile separator ','\n"
      << "set logscale x\n"
      << "set xlabel 'm [kg]'\n"
      << "set ylabel 'b [Ns/m]'\n"
      << "set title '" << title << "'\n"
      << "set view map\n"
      << "splot '" << csv << "' using 'm':'b':'" << column << "' with points pointtype 5 palette notitle\n";
}

TransferFunction robot_tf(const ToolkitConfig& config) { return robot_model(config).tf; }

StabilityMap compute_stability(const Context& ctx, const TransferFunction& g, double k_eq) {
  const auto& c = ctx.config;
  return stability_map(g, c.force_filter(), c.parameter_grid(), c.corners(k_eq), c.stability_margin, ctx.threads);
}

}  // namespace

CartesianModel robot_model(const ToolkitConfig& config) {
  const auto& r = config.robot;
  const DhTable dh = r.dh_table ? DhTable::load_csv(*r.dh_table) : DhTable::iiwa7_r800();
  const JointConfig q(r.theta_nom, r.limits);
  const auto row = parse_axis(r.row_axis);
  const auto col = parse_axis(r.col_axis);
  if (r.model_tf) {
    CartesianModel model = cartesian_tf(dh, q, DiagonalJointTf{}, row, col);
    model.tf = read_tf_file(*r.model_tf);
    return model;
  }
  return cartesian_tf(dh, q, joint_models(config), row, col);
}

std::vector<IdentifiedJoint> identify(const Context& ctx, const fs::path& sweep_dir, std::ostream& log) {
  if (!fs::is_directory(sweep_dir)) {
    throw ConfigError(fmt::format("sweep directory {} does not exist", sweep_dir.string()));
  }
  std::map<int, std::vector<std::pair<double, fs::path>>> by_joint;
  for (const auto& entry : fs::directory_iterator(sweep_dir)) {
    if (!entry.is_regular_file()) continue;
    if (auto name = parse_sweep_log_name(entry.path().filename().string())) {
      by_joint[name->joint_index].emplace_back(name->freq_hz, entry.path());
    }
  }
  if (by_joint.empty()) throw ConfigError(fmt::format("no sweep files in {}", sweep_dir.string()));

  const auto& id = ctx.config.ident;
  std::vector<IdentifiedJoint> out;
  for (auto& [joint, files] : by_joint) {
    std::sort(files.begin(), files.end());
    for (std::size_t i = 1; i < files.size(); ++i) {
      if (files[i].first == files[i - 1].first) {
        throw ConfigError(fmt::format("joint {}: two sweep files at {} Hz", joint, files[i].first));
      }
    }
    IdentifiedJoint result;
    result.frf.joint_index = joint;
    result.frf.points.resize(files.size());
    parallel_for(files.size(), ctx.threads, [&](std::size_t i) {
      const auto [ref, actual] = read_sweep_log(files[i].second);
      result.frf.points[i] = extract_frf(ref, actual, files[i].first);
    });
    result.frf.validate();
    result.fit = fit_rational(result.frf, id.num_order, id.den_order);

    const std::string stem = fmt::format("joint{}", joint);
    write_tf_file(ctx.out_dir / (stem + ".tf"), result.fit.tf,
                  fmt::format("joint {} position loop, fit orders ({}, {}), relative cost {:.3e}", joint,
                              id.num_order, id.den_order, result.fit.relative_cost));
    result.frf.save_csv(ctx.out_dir / (stem + "_frf.csv"));
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < result.frf.points.size(); ++i) {
      const auto& p = result.frf.points[i];
      const auto model = p.value() + result.fit.residuals[i];
      rows.push_back({p.freq_hz, p.gain, p.phase_rad, std::abs(model), std::arg(model),
                      std::abs(result.fit.residuals[i])});
    }
    write_csv(ctx.out_dir / (stem + "_fit.csv"),
              {fmt::format("relative_cost: {:.17g}", result.fit.relative_cost),
               fmt::format("iterations: {}", result.fit.iterations)},
              {"freq_hz", "gain", "phase_rad", "model_gain", "model_phase_rad", "residual_abs"}, rows);
    print(log, fmt::format("joint {}: {} points, relative cost {:.3e}, {}", joint, files.size(),
                           result.fit.relative_cost, result.fit.tf.to_string()));
    out.push_back(std::move(result));
  }
  return out;
}

Characterization characterize(const Context& ctx, std::ostream& log) {
  Characterization c;
  c.model = robot_model(ctx.config);
  write_tf_file(ctx.out_dir / "G.tf", c.model.tf, "end-effector velocity response to velocity reference");

  std::string margin_error;
  try {
    c.phase_margin_deg = phase_margin(c.model.tf);
  } catch (const Error& e) {
    margin_error = e.what();
  }

  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < c.model.weights.size(); ++i) {
    rows.push_back({static_cast<double>(i + 1), c.model.weights[i]});
  }
  std::vector<std::string> comments;
  if (c.phase_margin_deg) comments.push_back(fmt::format("phase_margin_deg: {:.17g}", *c.phase_margin_deg));
  write_csv(ctx.out_dir / "weights.csv", comments, {"joint", "weight"}, rows);

  print(log, fmt::format("G(s) = {}", c.model.tf.to_string()));
  for (std::size_t i = 0; i < c.model.weights.size(); ++i) {
    print(log, fmt::format("k{} = {:+.6f}", i + 1, c.model.weights[i]));
  }
  if (c.phase_margin_deg) print(log, fmt::format("phase margin: {:.2f} deg", *c.phase_margin_deg));
  else print(log, fmt::format("phase margin: n/a ({})", margin_error));

  const auto& r = ctx.config.robot;
  if (r.reference_weights) {
    std::string report;
    for (std::size_t i = 0; i < c.model.weights.size(); ++i) {
      const double diff = c.model.weights[i] - (*r.reference_weights)[i];
      if (std::abs(diff) > r.reference_tolerance) {
        report += fmt::format("joint {}: computed {:+.6f}, reference {:+.6f}, difference {:+.6f}\n", i + 1,
                              c.model.weights[i], (*r.reference_weights)[i], diff);
      }
    }
    c.dh_discrepancy = !report.empty();
    const fs::path report_path = ctx.out_dir / "dh_discrepancy.txt";
    if (c.dh_discrepancy) {
      std::ofstream out(report_path);
      out << "DH convention discrepancy: weights differ from the reference by more than " << r.reference_tolerance
          << "\n"
          << "Check the DH table convention (standard vs modified), link offsets and the flange length.\n"
          << report;
      print(log, fmt::format("WARNING: weights disagree with the reference, see {}", report_path.string()));
    } else {
      fs::remove(report_path);
      print(log, fmt::format("weights match the reference within {}", r.reference_tolerance));
    }
  }
  return c;
}

MapKind parse_map_kind(const std::string& name) {
  if (name == "stability") return MapKind::kStability;
  if (name == "transparency") return MapKind::kTransparency;
  if (name == "allowable") return MapKind::kAllowable;
  throw ConfigError(fmt::format("unknown map kind '{}'", name));
}

MapOutputs map(const Context& ctx, MapKind kind, std::optional<double> k_eq, bool gnuplot, std::ostream& log) {
  const auto& c = ctx.config;
  const TransferFunction g = robot_tf(c);
  MapOutputs out;

  if (kind != MapKind::kTransparency) {
    const double k = k_eq.value_or(c.impedance.k_pinned);
    out.stability = compute_stability(ctx, g, k);
    const auto& sm = *out.stability;
    sm.save_csv(ctx.out_dir / "stability_map.csv");

    std::vector<std::vector<double>> rows;
    const auto trace = boundary_trace(sm);
    for (std::size_t corner = 0; corner < trace.size(); ++corner) {
      for (const auto& p : trace[corner]) rows.push_back({static_cast<double>(corner), p.m, p.b});
    }
    write_csv(ctx.out_dir / "stability_boundary.csv", {fmt::format("k_eq: {:.17g}", k)}, {"corner", "m", "b"}, rows);

    const auto& bounds = c.impedance.bounds;
    if (bounds.b_lo < bounds.b_hi) {
      out.damping_destabilized = damping_destabilized_cells(sm, bounds.b_lo, bounds.b_hi);
      rows.clear();
      for (const auto& p : out.damping_destabilized) rows.push_back({p.m, p.b});
      write_csv(ctx.out_dir / "damping_destabilized.csv",
                {fmt::format("stable at b_eq = {:g}, unstable at b_eq = {:g}, k_eq = {:g}", bounds.b_lo, bounds.b_hi, k)},
                {"m", "b"}, rows);
    }

    const auto errors = static_cast<std::size_t>(std::count(sm.verdicts.begin(), sm.verdicts.end(), CellVerdict::kError));
    print(log, fmt::format("stability map at k_eq = {:g}: {} of {} cells robustly stable over {} corners", k,
                           sm.robust_count(), sm.grid.size(), sm.corners.size()));
    if (errors > 0) print(log, fmt::format("{} corner evaluations failed and count as unstable", errors));
    if (bounds.b_lo < bounds.b_hi) {
      print(log, fmt::format("{} cells are destabilized by raising b_eq from {:g} to {:g}", out.damping_destabilized.size(),
                             bounds.b_lo, bounds.b_hi));
    }
    if (gnuplot) write_gnuplot(ctx.out_dir / "stability_map.gp", "stability_map.csv", "robust", "robust stability");
  }

  if (kind != MapKind::kStability) {
    out.cost = cost_map(g, c.force_filter(), c.parameter_grid(), c.transparency_spec(), ctx.threads);
    out.cost->save_csv(ctx.out_dir / "cost_map.csv");
    std::size_t failed = 0;
    for (std::size_t cell = 0; cell < out.cost->cost.size(); ++cell) {
      if (!out.cost->cost[cell]) {
        ++failed;
        const auto p = out.cost->grid.at(cell);
        print(log, fmt::format("cost failed at {}: {}", fmt_params(p), out.cost->errors[cell]));
      }
    }
    print(log, fmt::format("cost map: {} cells, {} failed", out.cost->grid.size(), failed));
    if (gnuplot) write_gnuplot(ctx.out_dir / "cost_map.gp", "cost_map.csv", "cost", "transparency cost");
  }

  if (kind == MapKind::kAllowable) {
    out.allowable = superimpose(*out.stability, *out.cost);
    out.allowable->save_csv(ctx.out_dir / "allowable_region.csv");
    print(log, fmt::format("allowable region: {} of {} cells", out.allowable->allowed_count(),
                           out.allowable->grid.size()));
    if (gnuplot) write_gnuplot(ctx.out_dir / "allowable_region.gp", "allowable_region.csv", "allowed", "allowable region");
  }
  return out;
}

SimulationOutcome simulate(const Context& ctx, const SimulationRequest& request, std::ostream& log) {
  const auto& c = ctx.config;
  validate(request.controller);
  const TransferFunction g = robot_tf(c);
  const TransferFunction h = c.force_filter();
  const TransferFunction y = admittance_tf(request.controller);

  SimulationOutcome out;
  if (request.impedance) {
    validate(*request.impedance);
    out.impedance = *request.impedance;
  } else {
    const auto corners = c.corners(request.k_eq.value_or(c.impedance.k_pinned));
    if (request.corner) {
      if (*request.corner >= corners.size()) {
        throw ConfigError(fmt::format("corner {} out of range (there are {})", *request.corner, corners.size()));
      }
      out.impedance = corners[*request.corner];
    } else {
      double worst = -std::numeric_limits<double>::infinity();
      for (const auto& z : corners) {
        double re = std::numeric_limits<double>::infinity();
        try {
          re = max_pole_real_part({g, h, y, impedance_tf_allow_zero(z)});
        } catch (const Error&) {
        }
        if (re > worst) {
          worst = re;
          out.impedance = z;
        }
      }
    }
  }

  ForceProfile force;
  const auto& o = c.oracle;
  if (request.profile == "pulse") force = pulse_profile(o.pulse_amplitude, o.pulse_width);
  else if (request.profile == "step") force = step_profile(o.pulse_amplitude);
  else if (request.profile == "zero") force = zero_profile();
  else force = load_force_profile(request.profile);

  const TransferFunction z = impedance_tf_allow_zero(out.impedance);
  out.result = simulate_loop(g, y, h, z, force, c.sim_options());
  out.verdict = classify(out.result);
  out.analytic_stable = loop_is_stable({g, h, y, z}, c.stability_margin);
  out.result.save_csv(ctx.out_dir / "simulation.csv");

  print(log, fmt::format("controller {} against {}", fmt_params(request.controller), fmt_params(out.impedance)));
  print(log, fmt::format("oracle verdict: {}", to_string(out.verdict)));
  print(log, fmt::format("analytic verdict: {}", out.analytic_stable ? "stable" : "unstable"));
  return out;
}

AdmittanceParams select_controller(const Context& ctx, const SelectionPolicy& policy,
                                   const std::optional<fs::path>& region_csv, std::ostream& log) {
  AllowableRegion region;
  if (region_csv) {
    if (!fs::exists(*region_csv)) throw ConfigError(fmt::format("region file {} does not exist", region_csv->string()));
    region = AllowableRegion::load_csv(*region_csv);
  } else {
    region = *map(ctx, MapKind::kAllowable, std::nullopt, false, log).allowable;
  }
  const AdmittanceParams chosen = select(region, policy);
  const fs::path preset = ctx.out_dir / "controller_preset.ini";
  std::ofstream out(preset);
  if (!out) throw ConfigError(fmt::format("cannot write {}", preset.string()));
  out << fmt::format("[controller]\nm = {:.17g}\nb = {:.17g}\n", chosen.m, chosen.b);
  print(log, fmt::format("selected {}", fmt_params(chosen)));
  return chosen;
}

std::vector<fs::path> synthesize_sweeps(const Context& ctx, const std::vector<int>& joints, std::ostream& log) {
  const auto& id = ctx.config.ident;
  const DiagonalJointTf models = joint_models(ctx.config);
  std::vector<fs::path> written;
  for (int joint : joints) {
    if (joint < 1 || joint > kNumJoints) throw ConfigError(fmt::format("joint {} not in 1..{}", joint, kNumJoints));
    const auto& tf = models.entries[static_cast<std::size_t>(joint - 1)];
    const auto freqs = ctx.config.ident_frequencies();
    std::vector<fs::path> paths(freqs.size());
    parallel_for(freqs.size(), ctx.threads, [&](std::size_t i) {
      const double f = canonical_log_frequency(freqs[i]);
      SweepSpec spec;
      spec.joint_index = joint;
      spec.frequencies_hz = {f};
      spec.amplitude_rad = id.amplitude_rad;
      spec.sample_rate_hz = id.sample_rate_hz;
      spec.min_frequency_hz = std::min(id.f_min_hz, f);
      spec.max_frequency_hz = std::max(id.f_max_hz, f);
      spec.duration_per_freq_s = std::max(id.periods / f, id.min_duration_s);
      const Sweep sweep = generate_sweep(spec);
      const auto& ref = sweep.references.front();
      const auto actual = sinusoid_response_exact(tf, id.amplitude_rad, f, ref.t);
      paths[i] = ctx.out_dir / sweep_log_name(joint, f);
      write_sweep_log(paths[i], ref, actual);
    });
    print(log, fmt::format("joint {}: {} sweep logs", joint, paths.size()));
    written.insert(written.end(), paths.begin(), paths.end());
  }
  return written;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"admitforge: admittance controller design for physical human-robot interaction"};
  app.require_subcommand(1);
  std::string config_path;
  std::string out_dir = ".";
  unsigned threads = 0;
  app.add_option("--config", config_path, "INI configuration file");
  app.add_option("--out", out_dir, "output directory")->capture_default_str();
  app.add_option("--threads", threads, "worker threads (0: hardware concurrency)")->capture_default_str();

  auto* identify_cmd = app.add_subcommand("identify", "fit joint transfer functions to sweep logs");
  std::string sweep_dir;
  std::optional<int> num_order, den_order;
  identify_cmd->add_option("--sweeps", sweep_dir, "directory of joint<i>_f<Hz>.csv logs")->required();
  identify_cmd->add_option("--num-order", num_order, "numerator order");
  identify_cmd->add_option("--den-order", den_order, "denominator order");

  auto* characterize_cmd = app.add_subcommand("characterize", "synthesize G(s) and its joint weights");

  auto* map_cmd = app.add_subcommand("map", "stability, transparency or allowable-region map");
  std::string kind;
  std::optional<double> k_eq;
  bool gnuplot = false;
  map_cmd->add_option("--kind", kind, "stability | transparency | allowable")
      ->required()
      ->check(CLI::IsMember({"stability", "transparency", "allowable"}));
  map_cmd->add_option("--k-eq", k_eq, "equivalent stiffness for the corners [N/m]");
  map_cmd->add_flag("--gnuplot", gnuplot, "also write gnuplot scripts");

  auto* simulate_cmd = app.add_subcommand("simulate", "time-domain simulation of one loop");
  SimulationRequest sim;
  std::string corner = "worst";
  std::optional<double> m_eq, b_eq, sim_k_eq;
  simulate_cmd->add_option("--m", sim.controller.m, "virtual mass [kg]")->required();
  simulate_cmd->add_option("--b", sim.controller.b, "virtual damping [Ns/m]")->required();
  simulate_cmd->add_option("--corner", corner, "corner index or 'worst'")->capture_default_str();
  simulate_cmd->add_option("--m-eq", m_eq, "explicit equivalent mass [kg]");
  simulate_cmd->add_option("--b-eq", b_eq, "explicit equivalent damping [Ns/m]");
  simulate_cmd->add_option("--k-eq", sim_k_eq, "equivalent stiffness [N/m]");
  simulate_cmd->add_option("--profile", sim.profile, "pulse | step | zero | CSV file with t,f")->capture_default_str();

  auto* select_cmd = app.add_subcommand("select", "choose a controller from the allowable region");
  std::string policy_name = "min-cost";
  SelectionPolicy policy;
  std::string region;
  select_cmd->add_option("--policy", policy_name, "min-cost | min-cost-margin")
      ->check(CLI::IsMember({"min-cost", "min-cost-margin"}))
      ->capture_default_str();
  select_cmd->add_option("--delta-b", policy.delta_b, "damping margin [Ns/m]");
  select_cmd->add_option("--delta-m", policy.delta_m, "mass margin [kg]");
  select_cmd->add_option("--region", region, "allowable_region.csv from a previous map run");

  auto* sweep_cmd = app.add_subcommand("sweep", "write synthetic sweep logs from the configured joint models");
  std::vector<int> joints{2, 4, 6};
  sweep_cmd->add_option("--joints", joints, "joints to sweep (1-based)")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    Context ctx;
    ctx.config = config_path.empty() ? ToolkitConfig::from_environment() : ToolkitConfig::load(config_path);
    ctx.out_dir = out_dir;
    ctx.threads = threads;
    fs::create_directories(ctx.out_dir);

    if (*identify_cmd) {
      if (num_order) ctx.config.ident.num_order = *num_order;
      if (den_order) ctx.config.ident.den_order = *den_order;
      identify(ctx, sweep_dir, out);
    } else if (*characterize_cmd) {
      characterize(ctx, out);
    } else if (*map_cmd) {
      map(ctx, parse_map_kind(kind), k_eq, gnuplot, out);
    } else if (*simulate_cmd) {
      if (m_eq || b_eq) {
        sim.impedance = ImpedanceParams{m_eq.value_or(0.0), b_eq.value_or(0.0),
                                        sim_k_eq.value_or(ctx.config.impedance.k_pinned)};
      } else {
        sim.k_eq = sim_k_eq;
        if (corner != "worst") {
          try {
            sim.corner = static_cast<std::size_t>(std::stoul(corner));
          } catch (const std::exception&) {
            throw ConfigError(fmt::format("--corner must be an index or 'worst', got '{}'", corner));
          }
        }
      }
      simulate(ctx, sim, out);
    } else if (*select_cmd) {
      policy.kind = policy_name == "min-cost" ? SelectionPolicy::Kind::kMinCost
                                              : SelectionPolicy::Kind::kMinCostWithMargin;
      select_controller(ctx, policy, region.empty() ? std::nullopt : std::optional<fs::path>(region), out);
    } else if (*sweep_cmd) {
      synthesize_sweeps(ctx, joints, out);
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitComputation;
  }
  return kExitOk;
}

}  // namespace admitforge::cli
