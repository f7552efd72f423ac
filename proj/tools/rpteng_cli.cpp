#include <cstdio>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rpteng/driver.hpp"
#include "rpteng/error.hpp"
#include "rpteng/integrators.hpp"
#include "rpteng/network.hpp"
#include "rpteng/problems.hpp"

namespace {

using Flags = std::map<std::string, std::string>;

struct Command {
  CLI::App* app = nullptr;
  Flags flags;
  std::string config_file;
};

void add_flag(Command& cmd, const std::string& name, const std::string& help) {
  cmd.app->add_option_function<std::string>(
      "--" + name, [&cmd, name](const std::string& v) { cmd.flags[name] = v; }, help);
}

void add_run_flags(Command& cmd) {
  add_flag(cmd, "problem", "burgers|kdv|wave");
  add_flag(cmd, "dt", "time step");
  add_flag(cmd, "t-end", "final time");
  add_flag(cmd, "tableau", "euler|rk4");
  add_flag(cmd, "relaxation", "on|off");
  add_flag(cmd, "tangent-proj", "on|off");
  add_flag(cmd, "manifold-proj", "on|off");
  add_flag(cmd, "ns", "sample grid points");
  add_flag(cmd, "nm", "invariant grid points (0 = sample grid)");
  add_flag(cmd, "ne", "test grid points");
  add_flag(cmd, "seed", "initialisation seed");
  add_flag(cmd, "rcond", "relative singular value cutoff");
  add_flag(cmd, "out", "output CSV");
  add_flag(cmd, "snapshots", "write a field snapshot every k steps");
  add_flag(cmd, "snapshot-out", "snapshot CSV (default <out>.snapshots.csv)");
  add_flag(cmd, "widths", "hidden widths, comma separated");
  add_flag(cmd, "activation", "tanh|sin|identity");
  add_flag(cmd, "solver", "svd|sketched");
  add_flag(cmd, "teng-iters", "TENG sub-iterations per step");
  add_flag(cmd, "teng-tol-abs", "absolute TENG residual tolerance");
  add_flag(cmd, "teng-tol-rel", "relative TENG residual tolerance");
  add_flag(cmd, "teng-halvings", "step halvings per sub-iteration");
  add_flag(cmd, "stall-ratio", "stop sub-iterations once the residual ratio exceeds this");
  add_flag(cmd, "proj-tol", "relative projection tolerance");
  add_flag(cmd, "proj-max-iters", "projection iteration cap");
  add_flag(cmd, "policy", "strict|warn");
  add_flag(cmd, "project", "projected invariants, comma separated");
  add_flag(cmd, "fit-tol", "initial fit relative tolerance");
  add_flag(cmd, "fit-iters", "initial fit iteration cap");
  add_flag(cmd, "burgers-width", "Burgers bump width B");
  add_flag(cmd, "soliton-amplitude", "KdV soliton amplitude");
  add_flag(cmd, "soliton-offset", "KdV soliton offset");
  add_flag(cmd, "reference", "on|off: compute relative errors");
  add_flag(cmd, "ref-points", "spectral reference points");
  add_flag(cmd, "ref-dt", "spectral reference step");
  cmd.app->add_option("--config", cmd.config_file, "key = value file; flags override it");
}

rpteng::RunConfig build_config(const Command& cmd) {
  std::vector<std::pair<std::string, std::string>> file;
  if (!cmd.config_file.empty()) file = rpteng::read_config_file(cmd.config_file);
  std::string problem = "burgers";
  for (const auto& [k, v] : file) {
    if (k == "problem") problem = v;
  }
  if (auto it = cmd.flags.find("problem"); it != cmd.flags.end()) problem = it->second;
  rpteng::RunConfig config = rpteng::default_config(problem);
  for (const auto& [k, v] : file) {
    if (k != "problem") rpteng::apply_config_entry(config, k, v);
  }
  for (const auto& [k, v] : cmd.flags) {
    if (k != "problem") rpteng::apply_config_entry(config, k, v);
  }
  if (config.snapshot_every > 0 && config.snapshot_output.empty()) {
    config.snapshot_output = config.output.empty()
                                 ? std::filesystem::path("snapshots.csv")
                                 : std::filesystem::path(config.output.string() + ".snapshots.csv");
  }
  return config;
}

int fit_init(const Command& cmd) {
  const rpteng::RunConfig config = build_config(cmd);
  rpteng::validate(config);
  const rpteng::ProblemSpec problem = rpteng::make_problem(config.problem, config.problem_options);
  const auto grid = rpteng::make_grid(problem.a, problem.b, config.n_sample);
  const auto fit = rpteng::fit_initial(config.network, problem, grid, config.seed,
                                       config.fit_tolerance, config.fit_max_iterations);
  std::printf("network       %s\n", rpteng::describe(config.network).c_str());
  std::printf("parameters    %ld\n", long(fit.theta.size()));
  std::printf("seed used     %llu (%d tried)\n", (unsigned long long)fit.report.seed_used,
              fit.report.seeds_tried);
  std::printf("iterations    %d\n", fit.report.iterations);
  std::printf("fit error     %.6e%s\n", fit.report.relative_error,
              fit.report.reached_tolerance ? "" : "  (above tolerance)");
  if (!config.output.empty()) rpteng::save_params(config.output, config.network, fit.theta);
  return 0;
}

int solve(const Command& cmd, const std::string& params_in) {
  rpteng::RunConfig config = build_config(cmd);
  if (!params_in.empty()) config.initial_params = rpteng::load_params(params_in, config.network);
  const rpteng::RunResult result = rpteng::run(config);
  std::printf("fit error     %.6e\n", result.fit.relative_error);
  std::printf("steps         %zu\n", result.steps.size() - 1);
  std::printf("final t       %.17g\n", result.t_final);
  for (std::size_t i = 0; i < result.steps.front().invariants.size(); ++i) {
    double drift = 0.0;
    for (const auto& s : result.steps) drift = std::max(drift, std::abs(s.invariants[i].drift_init));
    std::printf("max |drift|   %-12s %.6e\n", result.steps.front().invariants[i].name.c_str(), drift);
  }
  if (result.steps.back().relative_error) {
    std::printf("final error   %.6e\n", *result.steps.back().relative_error);
  }
  return 0;
}

int reference(const Command& cmd) {
  const rpteng::RunConfig config = build_config(cmd);
  const rpteng::ProblemSpec problem = rpteng::make_problem(config.problem, config.problem_options);
  const int every = config.snapshot_every > 0 ? config.snapshot_every : 1;
  // Here --dt is the reference step itself.
  const double dt = cmd.flags.count("dt") ? config.dt : config.reference_dt;
  const auto ref =
      rpteng::spectral_reference(problem, config.reference_points, dt, config.t_end, every);
  const std::filesystem::path out = config.output.empty() ? "reference.csv" : config.output;
  rpteng::write_reference_csv(out, ref);
  std::printf("wrote %zu snapshots on %ld points to %s\n", ref.times.size(), long(ref.x.size()),
              out.string().c_str());
  return 0;
}

int compare(const Command& cmd, const std::string& run_csv, const std::string& ref_csv,
            const std::string& steps_csv) {
  const rpteng::RunConfig config = build_config(cmd);
  const rpteng::ProblemSpec problem = rpteng::make_problem(config.problem, config.problem_options);
  const auto rows = rpteng::compare(rpteng::read_snapshots(run_csv), rpteng::read_snapshots(ref_csv),
                                    problem.a, problem.length(), config.dt);
  const std::filesystem::path out = config.output.empty() ? "comparison.csv" : config.output;
  rpteng::write_comparison_csv(out, rows);
  double worst = 0.0;
  for (const auto& r : rows) worst = std::max(worst, r.relative_error);
  std::printf("snapshots     %zu\n", rows.size());
  std::printf("max error     %.6e\n", worst);
  if (!steps_csv.empty()) {
    for (const auto& s : rpteng::summarize_steps(steps_csv)) {
      std::printf("max |drift|   %-12s init %.6e  prev %.6e\n", s.name.c_str(),
                  s.max_abs_drift_init, s.max_abs_drift_prev);
    }
  }
  return 0;
}

int check_tableau(const std::string& name) {
  const rpteng::ButcherTableau tab = rpteng::tableau_by_name(name);
  const auto cond = rpteng::check_quadratic_condition(tab);
  std::printf("tableau              %s\n", tab.name.c_str());
  std::printf("stages               %d\n", tab.stages());
  std::printf("order                %d\n", tab.order);
  std::printf("explicit             %s\n", tab.is_explicit() ? "yes" : "no");
  std::printf("quadratic condition  %s (max violation %.3e)\n", cond.holds ? "holds" : "fails",
              cond.max_violation);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Relaxation-projection TENG solver"};
  app.require_subcommand(1);

  Command fit_cmd{app.add_subcommand("fit-init", "fit the initial condition and save parameters"), {}, {}};
  add_run_flags(fit_cmd);

  Command solve_cmd{app.add_subcommand("solve", "run the time-stepping loop"), {}, {}};
  add_run_flags(solve_cmd);
  std::string params_in;
  solve_cmd.app->add_option("--init-params", params_in, "start from saved parameters");

  Command ref_cmd{app.add_subcommand("reference", "spectral reference solution"), {}, {}};
  add_run_flags(ref_cmd);

  Command cmp_cmd{app.add_subcommand("compare", "relative errors of snapshots against a reference"), {}, {}};
  add_run_flags(cmp_cmd);
  std::string run_csv, ref_csv, steps_csv;
  cmp_cmd.app->add_option("--run", run_csv, "run snapshot CSV")->required();
  cmp_cmd.app->add_option("--against", ref_csv, "reference CSV")->required();
  cmp_cmd.app->add_option("--steps", steps_csv, "step CSV for the conservation summary");

  auto* tab_cmd = app.add_subcommand("check-tableau", "report the quadratic-invariant condition");
  std::string tableau = "rk4";
  tab_cmd->add_option("--tableau", tableau, "tableau name");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*fit_cmd.app) return fit_init(fit_cmd);
    if (*solve_cmd.app) return solve(solve_cmd, params_in);
    if (*ref_cmd.app) return reference(ref_cmd);
    if (*cmp_cmd.app) return compare(cmp_cmd, run_csv, ref_csv, steps_csv);
    if (*tab_cmd) return check_tableau(tableau);
  } catch (const rpteng::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 1;
}
