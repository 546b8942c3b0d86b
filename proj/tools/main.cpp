// Batch front end over the sectioned key/value configuration format:
// one subcommand per analysis, deterministic CSV/JSON outputs, and a JSON
// manifest per run so any output can be replayed and verified bitwise.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fluxmech/bifurcation.hpp"
#include "fluxmech/config.hpp"
#include "fluxmech/dynamics.hpp"
#include "fluxmech/errors.hpp"
#include "fluxmech/manifest.hpp"
#include "fluxmech/maps.hpp"
#include "fluxmech/model.hpp"
#include "fluxmech/response.hpp"
#include "fluxmech/selftest.hpp"

namespace {

using namespace fluxmech;

std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

/// Bundles the manifest and output directory of one invocation. Every file
/// goes through write(): CSVs get the `# run <hash>` marker line, JSON
/// documents a "run" field, and each write is recorded in the manifest.
struct RunContext {
  std::string out_dir;
  RunManifest manifest;
  std::chrono::steady_clock::time_point started = std::chrono::steady_clock::now();

  RunContext(std::string dir, const std::string& command, const ParsedConfig& cfg)
      : out_dir(std::move(dir)), manifest(make_manifest(command, cfg.resolved_text())) {
    std::filesystem::create_directories(out_dir.empty() ? "." : out_dir);
  }

  [[nodiscard]] std::string path_of(const std::string& name) const {
    return (std::filesystem::path(out_dir.empty() ? "." : out_dir) / name).string();
  }

  void write(const std::string& name, const std::string& content) {
    write_text_file(path_of(name), content);
    manifest.add_output(name, content);
  }

  /// Returns the emitted bytes (marker line + body) for callers that hash them.
  std::string write_csv(const std::string& name, const std::string& body) {
    std::string content = run_marker(manifest.config_hash_value()) + body;
    write(name, content);
    return content;
  }

  void write_json(const std::string& name, nlohmann::json j) {
    j["run"] = manifest.config_hash;
    write(name, j.dump(2) + "\n");
  }

  void finish() {
    manifest.wall_ms = std::chrono::duration<double, std::milli>(
                           std::chrono::steady_clock::now() - started)
                           .count();
    write_text_file(path_of("manifest.json"), manifest_to_json(manifest));
  }
};

OdeScheme scheme_from_config(const ParsedConfig& cfg) {
  const std::string name = cfg.get_string("run", "scheme", "rk853");
  if (name == "rk853") return OdeScheme::rk853;
  if (name == "rk45") return OdeScheme::rk45;
  throw config_error("run.scheme must be rk853 or rk45, got '" + name + "'");
}

int require_int(const ParsedConfig& cfg, const std::string& section,
                const std::string& key) {
  if (!cfg.has(section, key))
    throw config_error(cfg.source() + ": missing required key [" + section + "] " + key);
  return cfg.get_int(section, key, 0);
}

std::vector<double> linear_grid(double lo, double hi, int count) {
  std::vector<double> v(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i)
    v[static_cast<std::size_t>(i)] = lo + (i * (hi - lo)) / (count - 1);
  return v;
}

void cmd_simulate(const ParsedConfig& cfg, const std::string& out_dir) {
  const ModelConfig model = model_from_config(cfg);
  const EomParams eom = make_eom_params(model);

  SystemState init = equilibrium_guess(eom);
  init.s_minus = {cfg.get_double("run", "s_minus_re", init.s_minus.real()),
                  cfg.get_double("run", "s_minus_im", init.s_minus.imag())};
  init.s_z = cfg.get_double("run", "s_z", init.s_z);
  init.alpha = {cfg.get_double("run", "alpha_re", init.alpha.real()),
                cfg.get_double("run", "alpha_im", init.alpha.imag())};

  const double t_end = cfg.get_double("run", "t_end", 100.0);
  const double sample_dt = cfg.get_double("run", "sample_dt", 0.0);
  const double rel = cfg.get_double("run", "rel_tol", 1e-10);
  const double abs = cfg.get_double("run", "abs_tol", 1e-12);
  const OdeScheme scheme = scheme_from_config(cfg);

  RunContext run(out_dir, "simulate", cfg);
  try {
    const Trajectory traj = integrate(init, eom, 0.0, t_end, rel, abs, sample_dt, scheme);
    std::ostringstream body;
    write_trajectory_csv(body, traj);
    run.write_csv("trajectory.csv", body.str());
    run.finish();
  } catch (const integration_failure& e) {
    // flag the truncated data but still leave a manifest behind
    std::ostringstream body;
    body << "# partial: " << e.what() << "\n";
    write_trajectory_csv(body, e.partial());
    run.write_csv("trajectory.csv", body.str());
    run.finish();
    throw;
  }
}

void cmd_response(const ParsedConfig& cfg, const std::string& out_dir) {
  const ModelConfig model = model_from_config(cfg);
  const DerivedParams d = derive(model);

  const double w_min = cfg.get_double("run", "omega_min", 0.01);
  const double w_max = cfg.get_double("run", "omega_max", 4.0);
  const int count = cfg.get_int("run", "omega_count", 400);
  const std::string spacing = cfg.get_string("run", "omega_scale", "log");
  const bool oracle = cfg.get_int("run", "oracle", 0) != 0;
  if (count < 2) throw config_error("run.omega_count must be >= 2");
  if (!(w_min < w_max)) throw config_error("run.omega_min must be < run.omega_max");

  std::vector<double> grid(static_cast<std::size_t>(count));
  if (spacing == "log") {
    if (w_min <= 0.0) throw config_error("run.omega_min must be > 0 on a log grid");
    const double l0 = std::log(w_min);
    const double l1 = std::log(w_max);
    for (int i = 0; i < count; ++i)
      grid[static_cast<std::size_t>(i)] = std::exp(l0 + (i * (l1 - l0)) / (count - 1));
  } else if (spacing == "linear") {
    grid = linear_grid(w_min, w_max, count);
  } else {
    throw config_error("run.omega_scale must be log or linear, got '" + spacing + "'");
  }

  const ResponseCurves curves = response_curves(grid, d);

  RunContext run(out_dir, "response", cfg);
  std::ostringstream body;
  if (!oracle) {
    write_response_csv(body, curves.points, d.delta);
  } else {
    const EomParams eom = make_eom_params(model);
    body << "omega,delta,re_chi,im_chi,abs_chi,arg_chi,re_chi_numeric,im_chi_numeric\n";
    for (const ResponsePoint& p : curves.points) {
      const double mag = std::hypot(p.re_chi, p.im_chi);
      const double arg = mag == 0.0 ? 0.0 : std::atan2(p.im_chi, p.re_chi);
      const complexd measured = chi_z_numeric(p.omega, eom);
      body << fmt17(p.omega) << ',' << fmt17(d.delta) << ',' << fmt17(p.re_chi) << ','
           << fmt17(p.im_chi) << ',' << fmt17(mag) << ',' << fmt17(arg) << ','
           << fmt17(measured.real()) << ',' << fmt17(measured.imag()) << '\n';
    }
  }
  run.write_csv("response.csv", body.str());

  const ResponseResult rm = renormalized_mech(d, model.mech);
  nlohmann::json j;
  j["peak_omegas"] = curves.peak_omegas;
  j["chi_at_omega_m"] = {{"re", rm.chi.real()}, {"im", rm.chi.imag()}};
  j["gamma_m_tilde"] = rm.gamma_m_tilde;
  j["omega_m_tilde"] = rm.omega_m_tilde;
  run.write_json("response_summary.json", j);
  run.finish();
}

void cmd_bifurcate(const ParsedConfig& cfg, const std::string& out_dir) {
  const ModelConfig model = model_from_config(cfg);
  const EomParams base = make_eom_params(model);

  const double g_min = cfg.require_double("run", "g_min");
  const double g_max = cfg.require_double("run", "g_max");
  const int count = cfg.get_int("run", "g_count", 11);
  const double budget = cfg.get_double("run", "cycle_budget", 0.0);
  if (count < 2) throw config_error("run.g_count must be >= 2");
  if (!(g_min < g_max)) throw config_error("run.g_min must be < run.g_max");

  const std::vector<double> grid = linear_grid(g_min, g_max, count);
  EomParams seed_params = base;
  seed_params.g = grid.front();
  const SystemState guess = equilibrium_guess(seed_params);
  const BranchData branch = continuation_sweep(base, grid, guess, budget);

  RunContext run(out_dir, "bifurcate", cfg);
  std::ostringstream body;
  body << "g,stable,re_s_minus,im_s_minus,s_z,re_alpha,im_alpha";
  for (int k = 1; k <= 5; ++k) body << ",eig" << k << "_re,eig" << k << "_im";
  body << ",has_cycle,cycle_freq,cycle_amp_alpha,cycle_mean_s_z,cycle_converged"
       << ",s_z_max,s_z_min,abs_alpha_max,abs_alpha_min\n";
  for (const BranchPoint& pt : branch.points) {
    const SystemState& s = pt.eq.state;
    body << fmt17(pt.g) << ',' << (pt.eq.stable ? 1 : 0) << ','
         << fmt17(s.s_minus.real()) << ',' << fmt17(s.s_minus.imag()) << ','
         << fmt17(s.s_z) << ',' << fmt17(s.alpha.real()) << ',' << fmt17(s.alpha.imag());
    for (const auto& ev : pt.eq.eigenvalues)
      body << ',' << fmt17(ev.real()) << ',' << fmt17(ev.imag());
    body << ',' << (pt.has_cycle ? 1 : 0) << ',' << fmt17(pt.cycle.freq) << ','
         << fmt17(pt.cycle.amp_alpha) << ',' << fmt17(pt.cycle.mean_s_z) << ','
         << (pt.cycle.converged ? 1 : 0) << ',' << fmt17(pt.cycle_max[2]) << ','
         << fmt17(pt.cycle_min[2]) << ',' << fmt17(pt.max_abs_alpha) << ','
         << fmt17(pt.min_abs_alpha) << '\n';
  }
  run.write_csv("branch.csv", body.str());

  nlohmann::json th;
  th["truncated"] = branch.truncated;
  th["diagnostic"] = branch.diagnostic;
  try {
    th["g_crit_analytic"] = g_crit_analytic(derive(model), model.mech);
  } catch (const numeric_error&) {
    th["g_crit_analytic"] = nullptr; // no instability on this side of resonance
  }
  try {
    const HopfPoint hp = hopf_threshold(base, grid.front(), grid.back(), guess);
    th["g_c_numeric"] = hp.g;
    th["hopf_frequency"] = hp.frequency;
  } catch (const numeric_error&) {
    th["g_c_numeric"] = nullptr; // no stability change inside the sweep range
  }
  if (th["g_c_numeric"].is_number() && th["g_crit_analytic"].is_number()) {
    th["ratio_numeric_to_analytic"] =
        th["g_c_numeric"].get<double>() / th["g_crit_analytic"].get<double>();
  } else {
    th["ratio_numeric_to_analytic"] = nullptr;
  }
  run.write_json("threshold.json", th);
  run.finish();
}

void cmd_map(const ParsedConfig& cfg, const std::string& out_dir) {
  const ModelConfig model = model_from_config(cfg);

  FluxGridSpec spec;
  spec.phi_e0_min = cfg.require_double("run", "phi_e0_min");
  spec.phi_e0_max = cfg.require_double("run", "phi_e0_max");
  spec.phi_e0_count = require_int(cfg, "run", "phi_e0_count");
  spec.phi_e1_min = cfg.require_double("run", "phi_e1_min");
  spec.phi_e1_max = cfg.require_double("run", "phi_e1_max");
  spec.phi_e1_count = require_int(cfg, "run", "phi_e1_count");
  spec.n_max = cfg.get_int("run", "n_max", 0);
  spec.validate();

  const MapTile tile = damping_map(spec, model);

  RunContext run(out_dir, "map", cfg);
  std::ostringstream body;
  write_map_csv(body, tile);
  const std::string csv = run.write_csv("map.csv", body.str());

  nlohmann::json j;
  j["x_label"] = tile.x_label;
  j["y_label"] = tile.y_label;
  j["value_label"] = tile.value_label;
  j["axes"] = {{"phi_e0",
                {{"min", spec.phi_e0_min}, {"max", spec.phi_e0_max},
                 {"count", spec.phi_e0_count}}},
               {"phi_e1",
                {{"min", spec.phi_e1_min}, {"max", spec.phi_e1_max},
                 {"count", spec.phi_e1_count}}},
               {"n_max", spec.n_max}};
  j["parameters"] = {{"delta_gap", model.drive.delta_gap},
                     {"omega_drive", model.drive.omega_drive},
                     {"gamma1", model.qubit.gamma1},
                     {"gamma2", model.qubit.gamma2},
                     {"sigma_z_eq", model.qubit.sigma_z_eq},
                     {"omega_m", model.mech.omega_m},
                     {"gamma_m", model.mech.gamma_m},
                     {"g", model.mech.g}};
  j["normalization"] = {{"min_value", tile.min_value}, {"max_value", tile.max_value}};
  j["content_hash"] = hex64(fnv1a64(csv));
  run.write_json("map.json", j);
  run.finish();
}

/// Re-runs the command recorded in a manifest and verifies that every
/// output file hashes to the recorded value. Returns true when all match.
bool cmd_replay(const std::string& manifest_path, const std::string& out_dir) {
  const RunManifest recorded = manifest_from_json(read_text_file(manifest_path));

  ParsedConfig cfg;
  std::istringstream lines(recorded.config_text);
  std::string line;
  while (std::getline(lines, line))
    if (!line.empty()) cfg.set_override(line);

  if (recorded.command == "simulate") cmd_simulate(cfg, out_dir);
  else if (recorded.command == "response") cmd_response(cfg, out_dir);
  else if (recorded.command == "bifurcate") cmd_bifurcate(cfg, out_dir);
  else if (recorded.command == "map") cmd_map(cfg, out_dir);
  else throw config_error("replay: unknown command '" + recorded.command + "' in manifest");

  bool all_match = true;
  for (const OutputRecord& o : recorded.outputs) {
    const std::string content = read_text_file(
        (std::filesystem::path(out_dir.empty() ? "." : out_dir) / o.file).string());
    const bool match = hex64(fnv1a64(content)) == o.hash && content.size() == o.bytes;
    all_match = all_match && match;
    std::cout << (match ? "match    " : "MISMATCH ") << o.file << " " << o.hash << "\n";
  }
  return all_match;
}

std::string own_exe_path(const char* argv0) {
  std::error_code ec;
  const auto p = std::filesystem::read_symlink("/proc/self/exe", ec);
  if (!ec) return p.string();
  return argv0 != nullptr ? argv0 : "";
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Driven flux qubit coupled to a nanomechanical oscillator:\n"
               "trajectories, response curves, bifurcation branches, and flux maps\n"
               "with reproducible CSV/JSON outputs and run manifests."};
  app.require_subcommand(1);

  struct CommonOpts {
    std::string config;
    std::vector<std::string> sets;
    std::string out = ".";
  };
  auto add_common = [](CLI::App* sub, CommonOpts& o) {
    sub->add_option("config", o.config, "configuration file")->required();
    sub->add_option("--set", o.sets, "override, section.key=value (repeatable)");
    sub->add_option("--out", o.out, "output directory");
  };
  auto load = [](const CommonOpts& o) {
    ParsedConfig cfg = ParsedConfig::from_file(o.config);
    for (const std::string& s : o.sets) cfg.set_override(s);
    return cfg;
  };
  // grid convenience flags forward into [run] overrides so the manifest
  // captures them like any other configuration entry
  auto forward = [](ParsedConfig& cfg, const CLI::Option* opt, const std::string& key,
                    double value) {
    if (opt->count() > 0) cfg.set_override("run." + key + "=" + fmt17(value));
  };

  int rc = 0;

  CommonOpts sim;
  CLI::App* c_sim = app.add_subcommand(
      "simulate", "integrate the coupled equations and write the trajectory");
  add_common(c_sim, sim);
  c_sim->callback([&] { cmd_simulate(load(sim), sim.out); });

  CommonOpts res;
  bool oracle = false;
  double w_min = 0, w_max = 0;
  int w_count = 0;
  CLI::App* c_res =
      app.add_subcommand("response", "tabulate the qubit response chi_z over omega");
  add_common(c_res, res);
  c_res->add_flag("--oracle", oracle,
                  "append independently measured chi_z columns (slow)");
  const CLI::Option* o_wmin = c_res->add_option("--omega-min", w_min, "grid start");
  const CLI::Option* o_wmax = c_res->add_option("--omega-max", w_max, "grid end");
  const CLI::Option* o_wcount = c_res->add_option("--omega-count", w_count, "grid size");
  c_res->callback([&] {
    ParsedConfig cfg = load(res);
    forward(cfg, o_wmin, "omega_min", w_min);
    forward(cfg, o_wmax, "omega_max", w_max);
    forward(cfg, o_wcount, "omega_count", w_count);
    if (oracle) cfg.set_override("run.oracle=1");
    cmd_response(cfg, res.out);
  });

  CommonOpts bif;
  double g_min = 0, g_max = 0;
  int g_count = 0;
  CLI::App* c_bif = app.add_subcommand(
      "bifurcate", "equilibrium branch over a coupling range, stability and cycles");
  add_common(c_bif, bif);
  const CLI::Option* o_gmin = c_bif->add_option("--g-min", g_min, "coupling range start");
  const CLI::Option* o_gmax = c_bif->add_option("--g-max", g_max, "coupling range end");
  const CLI::Option* o_gcount = c_bif->add_option("--g-count", g_count, "grid size");
  c_bif->callback([&] {
    ParsedConfig cfg = load(bif);
    forward(cfg, o_gmin, "g_min", g_min);
    forward(cfg, o_gmax, "g_max", g_max);
    forward(cfg, o_gcount, "g_count", g_count);
    cmd_bifurcate(cfg, bif.out);
  });

  CommonOpts map_o;
  CLI::App* c_map = app.add_subcommand(
      "map", "mechanical damping correction over the flux-bias plane");
  add_common(c_map, map_o);
  c_map->callback([&] { cmd_map(load(map_o), map_o.out); });

  CLI::App* c_self = app.add_subcommand("selftest", "run the acceptance suite");
  c_self->callback([&] {
    const auto results = run_acceptance(std::cout, own_exe_path(argv[0]));
    rc = all_passed(results) ? 0 : 1;
  });

  std::string manifest_path;
  std::string replay_out = ".";
  CLI::App* c_rep = app.add_subcommand(
      "replay", "re-run a manifest and verify outputs hash-identically");
  c_rep->add_option("manifest", manifest_path, "manifest.json of a previous run")
      ->required();
  c_rep->add_option("--out", replay_out, "output directory");
  c_rep->callback([&] { rc = cmd_replay(manifest_path, replay_out) ? 0 : 1; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2; // help/version exit cleanly, bad usage is a config error
  } catch (const config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const io_error& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 4;
  } catch (const numeric_error& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 3;
  }
  return rc;
}
