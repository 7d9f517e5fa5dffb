#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "liectrl/config.hpp"
#include "liectrl/io.hpp"
#include "liectrl/log.hpp"

namespace {

using liectrl::ClassificationReport;
using liectrl::ControlSample;
using liectrl::CrossCheck;
using liectrl::GridGeometry;
using liectrl::GridOptions;
using liectrl::SystemConfig;
using liectrl::Vec;

struct CommonArgs {
  std::string config_path;
  std::string out_dir = ".";
  std::string format = "text";
  double horizon = -1.0;  // negative means "use config"
  double dwell = -1.0;
  double dt = -1.0;
  int cells = 0;
  int threads = 0;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool grid_flags) {
  cmd->add_option("--config", args.config_path, "system config JSON")->required();
  cmd->add_option("--out", args.out_dir, "output directory");
  if (grid_flags) {
    cmd->add_option("--horizon", args.horizon, "override the config horizon");
    cmd->add_option("--cells", args.cells, "override cells per axis");
    cmd->add_option("--dwell", args.dwell, "override the dwell time");
    cmd->add_option("--dt", args.dt, "override the grid integration step");
    cmd->add_option("--threads", args.threads, "worker threads");
  }
}

void apply_overrides(const CommonArgs& args, SystemConfig& cfg) {
  if (args.horizon >= 0.0) cfg.sim.horizon = args.horizon;
  if (args.dwell > 0.0) cfg.sim.dwell = args.dwell;
  if (args.dt > 0.0) cfg.sim.dt = args.dt;
  if (args.cells > 0) cfg.sim.cells.assign(cfg.sim.cells.size(), args.cells);
  if (args.threads > 0) cfg.sim.threads = args.threads;
}

void write_file(const std::string& dir, const std::string& name, const std::string& body) {
  std::filesystem::create_directories(dir);
  const std::string path = dir + "/" + name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw liectrl::InputError("cannot write " + path);
  out << body;
  liectrl::log_info("wrote " + path);
}

ClassificationReport analyze_system(const SystemConfig& cfg,
                                    const liectrl::SpectralDecomposition& dec,
                                    const std::optional<liectrl::NumericEvidence>& ev = {}) {
  return liectrl::classify(cfg.system, dec, ev);
}

int cmd_analyze(const CommonArgs& args) {
  SystemConfig cfg = liectrl::load_system_config(args.config_path);
  liectrl::ValidationReport validation =
      liectrl::validate_algebra(cfg.system.algebra, cfg.system.tol.alg);
  liectrl::SpectralDecomposition dec = liectrl::decompose(cfg.system.algebra, cfg.system.drift);
  liectrl::GradingReport grading =
      liectrl::verify_grading(cfg.system.algebra, cfg.system.drift);
  liectrl::IdentityReport identities = liectrl::decomposition_identities(cfg.system, dec);
  ClassificationReport report = analyze_system(cfg, dec);

  nlohmann::json j;
  j["system"] = cfg.name;
  j["validation"] = liectrl::validation_to_json(validation);
  j["spectral"] = liectrl::spectral_to_json(dec);
  j["grading"] = liectrl::grading_to_json(grading);
  j["identities"] = liectrl::identities_to_json(identities);
  j["classification"] = liectrl::classification_to_json(report);
  write_file(args.out_dir, cfg.name + "_report.json", j.dump(2) + "\n");

  if (args.format == "json") {
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "system: " << cfg.name << "\n"
              << liectrl::classification_to_text(report)
              << "grading residual: " << grading.worst_residual
              << (grading.pass ? " (pass)" : " (fail)") << "\n";
  }
  return 0;
}

int cmd_simulate(const CommonArgs& args, const std::string& u_csv, const std::string& x0_csv,
                 bool to_stdout) {
  SystemConfig cfg = liectrl::load_system_config(args.config_path);
  if (args.horizon >= 0.0) cfg.sim.horizon = args.horizon;
  const int d = cfg.system.algebra.dim();
  const int m = static_cast<int>(cfg.system.controls.size());

  auto parse_csv = [](const std::string& text, int n, const char* what) {
    Vec v = Vec::Zero(n);
    if (text.empty()) return v;
    std::stringstream ss(text);
    std::string item;
    int i = 0;
    while (std::getline(ss, item, ',')) {
      if (i >= n) throw liectrl::InputError(std::string(what) + ": too many entries");
      v[i++] = std::stod(item);
    }
    if (i != n) throw liectrl::InputError(std::string(what) + ": expected " +
                                          std::to_string(n) + " entries");
    return v;
  };
  Vec u = parse_csv(u_csv, m, "--u");
  Vec x0 = parse_csv(x0_csv, d, "--x0");

  liectrl::IntegrateOptions opts;
  opts.dt = cfg.sim.trajectory_dt;
  liectrl::Trajectory traj = liectrl::integrate(
      cfg.system, x0, {{cfg.sim.horizon, u}}, opts);
  const std::string csv = liectrl::trajectory_to_csv(traj);
  if (to_stdout) {
    std::cout << csv;
  } else {
    write_file(args.out_dir, cfg.name + "_trajectory.csv", csv);
    nlohmann::json j;
    j["system"] = cfg.name;
    j["horizon"] = cfg.sim.horizon;
    j["samples"] = traj.t.size();
    nlohmann::json fin = nlohmann::json::array();
    for (int i = 0; i < d; ++i) fin.push_back(traj.x.back()[i]);
    j["final"] = fin;
    std::cout << j.dump(2) << "\n";
  }
  return 0;
}

int cmd_reach(const CommonArgs& args) {
  SystemConfig cfg = liectrl::load_system_config(args.config_path);
  apply_overrides(args, cfg);
  GridGeometry geom = liectrl::make_grid(cfg.sim.box, cfg.sim.cells);
  ControlSample sample = ControlSample::standard(cfg.system.omega, cfg.sim.dwell);
  GridOptions opts{cfg.sim.dt, cfg.sim.threads};
  liectrl::OccupancyGrid grid =
      liectrl::reach_grid(cfg.system, cfg.sim.horizon, geom, sample, opts);
  write_file(args.out_dir, cfg.name + "_reachable.csv", liectrl::grid_to_csv(grid));

  liectrl::SpectralDecomposition dec = liectrl::decompose(cfg.system.algebra, cfg.system.drift);
  ClassificationReport report = analyze_system(cfg, dec);
  CrossCheck cc = liectrl::cross_check_reach(report, grid);

  nlohmann::json j;
  j["system"] = cfg.name;
  j["reach"] = liectrl::grid_summary_json(grid);
  j["classification"] = liectrl::classification_to_json(report);
  j["cross_check"] = cc.lines;
  j["cross_check_agree"] = cc.all_agree;
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_controlset(const CommonArgs& args) {
  SystemConfig cfg = liectrl::load_system_config(args.config_path);
  apply_overrides(args, cfg);
  GridGeometry geom = liectrl::make_grid(cfg.sim.box, cfg.sim.cells);
  ControlSample sample = ControlSample::standard(cfg.system.omega, cfg.sim.dwell);
  GridOptions opts{cfg.sim.dt, cfg.sim.threads};

  liectrl::SpectralDecomposition dec = liectrl::decompose(cfg.system.algebra, cfg.system.drift);
  liectrl::ControlSetResult result = liectrl::control_set_estimate(
      cfg.system, cfg.sim.horizon, geom, sample, opts, &dec);

  std::optional<liectrl::NumericEvidence> evidence;
  if (result.reach_in_gminus_bounded && result.controllable_in_gplus_bounded) {
    evidence = liectrl::NumericEvidence{*result.reach_in_gminus_bounded,
                                        *result.controllable_in_gplus_bounded};
  }
  ClassificationReport report = analyze_system(cfg, dec, evidence);
  CrossCheck cc = liectrl::cross_check_controlset(report, result);

  write_file(args.out_dir, cfg.name + "_reachable.csv", liectrl::grid_to_csv(result.reach));
  write_file(args.out_dir, cfg.name + "_controllable.csv",
             liectrl::grid_to_csv(result.controllable));
  write_file(args.out_dir, cfg.name + "_control_set.csv",
             liectrl::grid_to_csv(result.estimate));

  nlohmann::json j;
  j["system"] = cfg.name;
  j["result"] = liectrl::controlset_to_json(result);
  j["classification"] = liectrl::classification_to_json(report);
  j["cross_check"] = cc.lines;
  j["cross_check_agree"] = cc.all_agree;

  if (cfg.checks.duality_horizon && *cfg.checks.duality_horizon != cfg.sim.horizon) {
    liectrl::OccupancyGrid fwd =
        liectrl::reach_grid(cfg.system, *cfg.checks.duality_horizon, geom, sample, opts);
    liectrl::ControllableResult dual = liectrl::controllable_grid(
        cfg.system, *cfg.checks.duality_horizon, geom, sample, opts, &fwd);
    j["duality_at_check_horizon"] = liectrl::duality_to_json(*dual.duality);
  }
  if (cfg.checks.semigroup_tau1 && cfg.checks.semigroup_tau2) {
    GridGeometry sgeom = cfg.checks.semigroup_cells
                             ? liectrl::make_grid(cfg.sim.box, *cfg.checks.semigroup_cells)
                             : geom;
    liectrl::SemigroupCheck sg =
        liectrl::semigroup_check(cfg.system, *cfg.checks.semigroup_tau1,
                                 *cfg.checks.semigroup_tau2, sgeom, sample, opts);
    j["semigroup"] = nlohmann::json{
        {"tau1", *cfg.checks.semigroup_tau1},
        {"tau2", *cfg.checks.semigroup_tau2},
        {"ratio", sg.ratio},
        {"symdiff", sg.symdiff},
        {"union", sg.union_count}};
  }
  std::cout << j.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"linear control systems on low-dimensional Lie groups"};
  app.require_subcommand(1);

  CommonArgs analyze_args, simulate_args, reach_args, controlset_args;
  std::string u_csv, x0_csv;
  bool traj_stdout = false;

  CLI::App* analyze = app.add_subcommand("analyze", "algebraic and spectral classification");
  add_common(analyze, analyze_args, false);
  analyze->add_option("--format", analyze_args.format, "text or json")
      ->check(CLI::IsMember({"text", "json"}));

  CLI::App* simulate = app.add_subcommand("simulate", "integrate one trajectory");
  add_common(simulate, simulate_args, false);
  simulate->add_option("--horizon", simulate_args.horizon, "integration horizon");
  simulate->add_option("--u", u_csv, "constant control value, comma separated");
  simulate->add_option("--x0", x0_csv, "initial point, comma separated");
  simulate->add_flag("--stdout", traj_stdout, "print the CSV instead of writing a file");

  CLI::App* reach = app.add_subcommand("reach", "occupancy grid of the reachable set");
  add_common(reach, reach_args, true);

  CLI::App* controlset =
      app.add_subcommand("controlset", "reachable/controllable grids and control set estimate");
  add_common(controlset, controlset_args, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(analyze)) return cmd_analyze(analyze_args);
    if (app.got_subcommand(simulate)) {
      return cmd_simulate(simulate_args, u_csv, x0_csv, traj_stdout);
    }
    if (app.got_subcommand(reach)) return cmd_reach(reach_args);
    if (app.got_subcommand(controlset)) return cmd_controlset(controlset_args);
  } catch (const liectrl::InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const liectrl::DomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return 2;
  } catch (const liectrl::UnsupportedError& e) {
    std::cerr << "unsupported: " << e.what() << "\n";
    return 2;
  } catch (const liectrl::DivergenceError& e) {
    std::cerr << "divergence: " << e.what() << "\n";
    return 4;
  } catch (const liectrl::InconsistencyError& e) {
    std::cerr << "internal inconsistency: " << e.what() << "\n";
    return 3;
  } catch (const liectrl::NumericError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
