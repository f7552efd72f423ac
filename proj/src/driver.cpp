#include "rpteng/driver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <memory>
#include <sstream>

#include <Eigen/QR>

#include "rpteng/error.hpp"
#include "rpteng/invariants.hpp"
#include "rpteng/spectral.hpp"
#include "svd.hpp"

namespace rpteng {

namespace {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(trim(item));
  return parts;
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorKind::invalid_config, key + ": expected a number, got '" + value + "'");
  }
}

long long parse_integer(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorKind::invalid_config, key + ": expected an integer, got '" + value + "'");
  }
}

bool parse_switch(const std::string& key, const std::string& value) {
  if (value == "on" || value == "true" || value == "1") return true;
  if (value == "off" || value == "false" || value == "0") return false;
  throw Error(ErrorKind::invalid_config, key + ": expected on|off, got '" + value + "'");
}

std::vector<InvariantSpec> projected_set(const RunConfig& config, const ProblemSpec& problem) {
  std::vector<InvariantSpec> out;
  if (config.projected_invariants.empty()) {
    switch (problem.kind) {
      case ProblemKind::burgers: out.push_back(mass_invariant()); break;
      case ProblemKind::kdv: out.push_back(energy_invariant()); break;
      case ProblemKind::wave: out.push_back(hamiltonian_invariant()); break;
    }
    return out;
  }
  for (const auto& name : config.projected_invariants) out.push_back(parse_invariant(name));
  return out;
}

const InvariantSpec* relaxed_invariant(const std::vector<InvariantSpec>& projected) {
  for (const auto& inv : projected) {
    if (inv.degree() == 2) return &inv;
  }
  return nullptr;
}

bool any_feature(const RunConfig& c) {
  return c.relaxation || c.tangent_projection || c.manifold_projection;
}

/// Tracked invariants: the problem's own, plus any projected one it does not list.
std::vector<InvariantSpec> tracked_set(const ProblemSpec& problem,
                                       const std::vector<InvariantSpec>& projected) {
  std::vector<InvariantSpec> out = problem.invariants;
  for (const auto& inv : projected) {
    const bool known = std::any_of(out.begin(), out.end(),
                                   [&](const InvariantSpec& o) { return o.name == inv.name; });
    if (!known) out.push_back(inv);
  }
  return out;
}

}  // namespace

RunConfig default_config(std::string_view problem) {
  RunConfig c;
  const ProblemSpec spec = make_problem(problem);
  c.problem = spec.name;
  c.network.domain_length = spec.length();
  c.network.output_dim = spec.components;
  c.network.hidden_widths = {10, 10, 10, 10};
  c.network.activation = Activation::tanh;
  // The projection stops as soon as it is inside tolerance; one decade below the conservation
  // targets keeps the post-step drift under them.
  c.projection.relative_tolerance = 1e-13;
  switch (spec.kind) {
    case ProblemKind::burgers:
      c.dt = 5e-3;
      c.t_end = 0.5;
      c.tableau = "euler";
      c.relaxation = false;
      c.manifold_projection = true;
      c.reference_points = 512;
      break;
    case ProblemKind::kdv:
      c.network.activation = Activation::sin;
      c.dt = 5e-3;
      c.t_end = 1.0;
      c.tableau = "rk4";
      c.relaxation = true;
      c.manifold_projection = true;
      break;
    case ProblemKind::wave:
      c.network.hidden_widths = {20, 20, 20, 20};
      // 512 sampled values against 1362 parameters: the fit flattens out near 7e-6.
      c.n_sample = 256;
      c.fit_tolerance = 1e-5;
      c.dt = 1e-3;
      c.t_end = 1.0;
      c.tableau = "rk4";
      c.relaxation = true;
      c.manifold_projection = true;
      break;
  }
  return c;
}

void apply_config_entry(RunConfig& c, const std::string& key, const std::string& value) {
  const std::string& k = key;
  const std::string v = trim(value);
  if (k == "problem") {
    const RunConfig fresh = default_config(v);
    c.problem = fresh.problem;
    c.network = fresh.network;
  } else if (k == "dt") {
    c.dt = parse_double(k, v);
  } else if (k == "t-end") {
    c.t_end = parse_double(k, v);
  } else if (k == "tableau") {
    c.tableau = v;
  } else if (k == "relaxation") {
    c.relaxation = parse_switch(k, v);
  } else if (k == "tangent-proj") {
    c.tangent_projection = parse_switch(k, v);
  } else if (k == "manifold-proj") {
    c.manifold_projection = parse_switch(k, v);
  } else if (k == "ns") {
    c.n_sample = int(parse_integer(k, v));
  } else if (k == "nm") {
    c.n_invariant = int(parse_integer(k, v));
  } else if (k == "ne") {
    c.n_test = int(parse_integer(k, v));
  } else if (k == "seed") {
    c.seed = std::uint64_t(parse_integer(k, v));
  } else if (k == "rcond") {
    c.teng.rcond = parse_double(k, v);
  } else if (k == "out") {
    c.output = v;
  } else if (k == "snapshot-out") {
    c.snapshot_output = v;
  } else if (k == "snapshots") {
    c.snapshot_every = int(parse_integer(k, v));
  } else if (k == "widths") {
    std::vector<int> widths;
    for (const auto& w : split(v, ',')) widths.push_back(int(parse_integer(k, w)));
    c.network.hidden_widths = widths;
  } else if (k == "activation") {
    c.network.activation = parse_activation(v);
  } else if (k == "solver") {
    if (v == "svd") {
      c.teng.solver = LsSolver::truncated_svd;
    } else if (v == "sketched") {
      c.teng.solver = LsSolver::sketched;
    } else {
      throw Error(ErrorKind::invalid_config, "solver: expected svd|sketched, got '" + v + "'");
    }
  } else if (k == "teng-iters") {
    c.teng.max_iterations = int(parse_integer(k, v));
  } else if (k == "teng-tol-abs") {
    c.teng.tol_abs = parse_double(k, v);
  } else if (k == "teng-tol-rel") {
    c.teng.tol_rel = parse_double(k, v);
  } else if (k == "teng-halvings") {
    c.teng.max_halvings = int(parse_integer(k, v));
  } else if (k == "stall-ratio") {
    c.teng.stall_ratio = parse_double(k, v);
  } else if (k == "proj-tol") {
    c.projection.relative_tolerance = parse_double(k, v);
  } else if (k == "proj-max-iters") {
    c.projection.max_iterations = int(parse_integer(k, v));
  } else if (k == "policy") {
    if (v == "strict") {
      c.policy = FailurePolicy::strict;
    } else if (v == "warn") {
      c.policy = FailurePolicy::warn;
    } else {
      throw Error(ErrorKind::invalid_config, "policy: expected strict|warn, got '" + v + "'");
    }
  } else if (k == "project") {
    c.projected_invariants = v.empty() ? std::vector<std::string>{} : split(v, ',');
  } else if (k == "fit-tol") {
    c.fit_tolerance = parse_double(k, v);
  } else if (k == "fit-iters") {
    c.fit_max_iterations = int(parse_integer(k, v));
  } else if (k == "burgers-width") {
    c.problem_options.burgers_width = parse_double(k, v);
  } else if (k == "soliton-amplitude") {
    c.problem_options.soliton_amplitude = parse_double(k, v);
  } else if (k == "soliton-offset") {
    c.problem_options.soliton_offset = parse_double(k, v);
  } else if (k == "reference") {
    c.compute_error = parse_switch(k, v);
  } else if (k == "ref-points") {
    c.reference_points = int(parse_integer(k, v));
  } else if (k == "ref-dt") {
    c.reference_dt = parse_double(k, v);
  } else {
    throw Error(ErrorKind::invalid_config, "unknown option '" + k + "'");
  }
}

std::vector<std::pair<std::string, std::string>> read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open config file " + path.string());
  std::vector<std::pair<std::string, std::string>> entries;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorKind::invalid_config,
                  path.string() + ":" + std::to_string(lineno) + ": expected key = value");
    }
    std::string key = trim(line.substr(0, eq));
    if (key.rfind("--", 0) == 0) key = key.substr(2);
    entries.emplace_back(key, trim(line.substr(eq + 1)));
  }
  return entries;
}

void validate(const RunConfig& c) {
  auto fail = [](const std::string& msg) { throw Error(ErrorKind::invalid_config, msg); };
  if (!(c.dt > 0.0)) fail("dt must be > 0");
  if (!(c.t_end > 0.0)) fail("t-end must be > 0");
  if (c.n_sample < 2 || c.n_test < 2 || c.n_invariant < 0 || c.n_invariant == 1) {
    fail("grid sizes must be >= 2");
  }
  if (c.snapshot_every < 0) fail("snapshots must be >= 0");
  if (!(c.fit_tolerance > 0.0) || c.fit_max_iterations < 1) fail("bad fit settings");
  if (c.teng.max_iterations < 1) fail("teng-iters must be >= 1");
  if (!(c.teng.rcond > 0.0) || !(c.teng.rcond < 1.0)) fail("rcond must be in (0, 1)");
  const ProblemSpec problem = make_problem(c.problem, c.problem_options);
  if (c.network.output_dim != problem.components) {
    fail("network output dimension does not match the problem");
  }
  const ButcherTableau tab = tableau_by_name(c.tableau);
  if (!tab.is_explicit()) fail("tableau '" + c.tableau + "' is implicit");
  const auto projected = projected_set(c, problem);
  if (any_feature(c) && projected.empty()) {
    fail("structure-preserving features need at least one invariant");
  }
  if (c.relaxation && relaxed_invariant(projected) == nullptr) {
    fail("relaxation needs a quadratic invariant among the projected ones");
  }
  if (c.initial_params) check_params(c.network, *c.initial_params);
}

FitResult fit_params(const NetworkSpec& net, const FlatParams& theta, const QuadratureGrid& grid,
                     const Field& target, double tolerance, int max_iterations, double rcond) {
  if (target.cols() != grid.n || target.rows() != net.output_dim) {
    throw Error(ErrorKind::length_mismatch, "fit target does not match grid/network");
  }
  const double scale = weighted_norm(grid, target);
  const auto relative = [scale](double residual) { return scale > 0.0 ? residual / scale : residual; };

  FitResult out;
  out.theta = theta;
  double residual = weighted_norm(grid, target - forward(net, theta, grid.points));
  out.report.relative_error = relative(residual);

  // Levenberg-Marquardt on the Gauss-Newton system. One SVD per iteration makes every damping
  // trial a cheap filter on the singular values.
  double mu = 1e-3;
  constexpr int window = 50;
  double window_start = residual;
  while (out.report.relative_error > tolerance && out.report.iterations < max_iterations) {
    const LeastSquaresSystem system =
        assemble_system(net, out.theta, grid, target - forward(net, out.theta, grid.points));
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(system.jacobian);
    const Eigen::Index n = system.jacobian.cols();
    const Eigen::Index k = std::min(n, system.jacobian.rows());
    const Eigen::MatrixXd r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
    const Eigen::VectorXd qtr = (qr.householderQ().transpose() * system.rhs).head(k);
    const detail::ThinSvd svd = detail::thin_svd(r);
    const Eigen::VectorXd& sigma = svd.sigma;
    const Eigen::VectorXd coeff = svd.u.transpose() * qtr;
    const double s0 = sigma.size() ? sigma[0] : 0.0;
    if (!(s0 > 0.0)) break;

    bool accepted = false;
    for (int trial = 0; trial < 40; ++trial) {
      const double damping = mu * s0 * s0;
      Eigen::VectorXd filtered(sigma.size());
      for (Eigen::Index i = 0; i < sigma.size(); ++i) {
        filtered[i] = sigma[i] > rcond * s0 ? coeff[i] * sigma[i] / (sigma[i] * sigma[i] + damping)
                                            : 0.0;
      }
      const FlatParams candidate = out.theta + svd.v * filtered;
      const double trial_residual =
          weighted_norm(grid, target - forward(net, candidate, grid.points));
      if (trial_residual < residual) {
        out.theta = candidate;
        residual = trial_residual;
        mu = std::max(mu / 3.0, 1e-15);
        accepted = true;
        break;
      }
        mu *= 4.0;
    }
    if (!accepted) break;
    ++out.report.iterations;
    out.report.relative_error = relative(residual);
    if (out.report.iterations % window == 0) {
      if (residual > 0.99 * window_start) break;
      window_start = residual;
    }
  }
  out.report.reached_tolerance = out.report.relative_error <= tolerance;
  return out;
}

FitResult fit_initial(const NetworkSpec& net, const ProblemSpec& problem,
                      const QuadratureGrid& grid, std::uint64_t seed, double tolerance,
                      int max_iterations) {
  if (net.output_dim != problem.components) {
    throw Error(ErrorKind::parameter_mismatch, "network output does not match problem components");
  }
  const Field target = initial_field(problem, grid.points);
  constexpr int retries = 5;
  FitResult best;
  best.report.relative_error = std::numeric_limits<double>::infinity();
  for (int attempt = 0; attempt <= retries; ++attempt) {
    const std::uint64_t s = seed + std::uint64_t(attempt);
    FitResult fit =
        fit_params(net, init_params(net, s), grid, target, tolerance, max_iterations);
    fit.report.seed_used = s;
    fit.report.seeds_tried = attempt + 1;
    if (fit.report.relative_error < best.report.relative_error) best = std::move(fit);
    best.report.seeds_tried = attempt + 1;
    if (best.report.reached_tolerance) return best;
  }
  if (!(best.report.relative_error <= 100.0 * tolerance)) {
    throw Error(ErrorKind::fit_failed,
                "initial fit reached relative error " + format_double(best.report.relative_error) +
                    " after " + std::to_string(retries + 1) + " seeds");
  }
  return best;
}

double relative_error(const Field& approx, const Field& reference) {
  if (approx.rows() != reference.rows() || approx.cols() != reference.cols()) {
    throw Error(ErrorKind::length_mismatch, "relative_error: fields differ in shape");
  }
  const double den = reference.colwise().norm().sum();
  if (!(den > 0.0)) throw Error(ErrorKind::zero_denominator, "reference field is identically zero");
  return (approx - reference).colwise().norm().sum() / den;
}

namespace {

/// Reference values on the test grid at the run's times.
class ErrorProbe {
 public:
  ErrorProbe(const RunConfig& config, const ProblemSpec& problem, const QuadratureGrid& test)
      : problem_(problem), test_(test) {
    if (problem.reference == ReferenceKind::analytic) return;
    // Reference steps divide the run step so snapshot times fall on multiples of dt.
    const int sub = std::max(1, int(std::ceil(config.dt / config.reference_dt - 1e-9)));
    ref_ = spectral_reference(problem, config.reference_points, config.dt / sub,
                              config.t_end + config.dt, sub);
    basis_ = trig_interpolation_matrix(config.reference_points, ref_.a, ref_.length, test.points);
  }

  /// Returns the reference field and the time gap of the sample used.
  std::pair<Field, double> at(double t) const {
    if (problem_.reference == ReferenceKind::analytic) {
      return {analytic_reference(problem_, t, test_.points), 0.0};
    }
    const std::size_t i = ref_.nearest(t);
    return {ref_.snapshots[i] * basis_.transpose(), std::abs(ref_.times[i] - t)};
  }

 private:
  const ProblemSpec& problem_;
  const QuadratureGrid& test_;
  ReferenceSolution ref_;
  Eigen::MatrixXd basis_;
};

void append_snapshot(std::ofstream& out, double t, const Eigen::VectorXd& x, const Field& u) {
  for (Eigen::Index p = 0; p < x.size(); ++p) {
    for (Eigen::Index c = 0; c < u.rows(); ++c) {
      out << format_double(t) << ',' << format_double(x[p]) << ',' << c << ','
          << format_double(u(c, p)) << '\n';
    }
  }
}

}  // namespace

RunResult run(const RunConfig& config) {
  validate(config);
  const ProblemSpec problem = make_problem(config.problem, config.problem_options);
  const NetworkSpec& net = config.network;
  const ButcherTableau tableau = tableau_by_name(config.tableau);
  const std::vector<InvariantSpec> projected = projected_set(config, problem);
  const std::vector<InvariantSpec> tracked = tracked_set(problem, projected);
  const InvariantSpec* relax = config.relaxation ? relaxed_invariant(projected) : nullptr;

  const QuadratureGrid grid_s = make_grid(problem.a, problem.b, config.n_sample);
  const QuadratureGrid grid_m = (config.n_invariant == 0 || config.n_invariant == config.n_sample)
                                    ? grid_s
                                    : make_grid(problem.a, problem.b, config.n_invariant);
  const QuadratureGrid grid_e = make_staggered_grid(problem.a, problem.b, config.n_test);

  RunResult result;
  if (config.initial_params) {
    result.theta0 = *config.initial_params;
    const Field u0 = initial_field(problem, grid_s.points);
    const double scale = weighted_norm(grid_s, u0);
    const double res = weighted_norm(grid_s, u0 - forward(net, result.theta0, grid_s.points));
    result.fit.relative_error = scale > 0.0 ? res / scale : res;
    result.fit.reached_tolerance = result.fit.relative_error <= config.fit_tolerance;
  } else {
    FitResult fit = fit_initial(net, problem, grid_s, config.seed, config.fit_tolerance,
                                config.fit_max_iterations);
    result.theta0 = std::move(fit.theta);
    result.fit = fit.report;
  }

  std::unique_ptr<ErrorProbe> probe;
  if (config.compute_error) probe = std::make_unique<ErrorProbe>(config, problem, grid_e);

  std::ofstream csv;
  if (!config.output.empty()) {
    csv.open(config.output);
    if (!csv) throw Error(ErrorKind::io, "cannot write " + config.output.string());
    write_step_csv_header(csv, tracked);
  }
  std::ofstream snap_csv;
  if (config.snapshot_every > 0 && !config.snapshot_output.empty()) {
    snap_csv.open(config.snapshot_output);
    if (!snap_csv) throw Error(ErrorKind::io, "cannot write " + config.snapshot_output.string());
    snap_csv << "t,x,component,value\n";
  }

  result.anchors = invariant_values(net, result.theta0, grid_m, tracked);
  Eigen::VectorXd proj_anchors(Eigen::Index(projected.size()));
  for (std::size_t j = 0; j < projected.size(); ++j) {
    for (std::size_t i = 0; i < tracked.size(); ++i) {
      if (tracked[i].name == projected[j].name) proj_anchors[Eigen::Index(j)] = result.anchors[Eigen::Index(i)];
    }
  }

  const auto emit = [&](StepReport& report, const FlatParams& theta, const Eigen::VectorXd& prev) {
    const Eigen::VectorXd values = invariant_values(net, theta, grid_m, tracked);
    for (std::size_t i = 0; i < tracked.size(); ++i) {
      InvariantSample& s = report.invariants[i];
      const Eigen::Index ii = Eigen::Index(i);
      s.name = tracked[i].name;
      s.value = values[ii];
      s.drift_init = values[ii] - result.anchors[ii];
      s.drift_prev = values[ii] - prev[ii];
    }
    const bool snap = config.snapshot_every > 0 && report.step % config.snapshot_every == 0;
    if (probe || snap) {
      const Field u = forward(net, theta, grid_e.points);
      if (probe) {
        const auto [ref, gap] = probe->at(report.t);
        report.relative_error = relative_error(u, ref);
        report.reference_gap = gap;
      }
      if (snap) {
        result.snapshots.emplace_back(report.t, theta);
        if (snap_csv.is_open()) append_snapshot(snap_csv, report.t, grid_e.points, u);
      }
    }
    if (csv.is_open()) {
      write_step_csv_row(csv, report);
      csv.flush();
    }
    result.steps.push_back(report);
    return values;
  };

  FlatParams theta = result.theta0;
  double t = 0.0;
  StepReport initial;
  initial.invariants.resize(tracked.size());
  Eigen::VectorXd prev = emit(initial, theta, result.anchors);

  const GradientProvider gradients = [&](const FlatParams& th) {
    const JacobianEval eval = parameter_jacobian(net, th, grid_m.points);
    std::vector<Eigen::VectorXd> g;
    for (const auto& inv : projected) g.push_back(invariant_theta_gradient(inv, grid_m, eval));
    return g;
  };

  const bool strict = config.policy == FailurePolicy::strict;
  // Guards against t_end landing one rounding error past a multiple of dt.
  const double t_stop = config.t_end - 1e-12 * std::max(1.0, config.t_end);
  long step = 0;
  while (t < t_stop) {
    ++step;
    StepReport report;
    report.step = step;
    report.invariants.resize(tracked.size());

    const RelaxedTarget target = build_relaxed_target(net, theta, grid_s, problem, tableau,
                                                      config.dt, relax, config.relax);
    report.gamma = target.gamma;
    report.relaxation = target.relaxation;
    for (std::size_t i = 0; i < tracked.size(); ++i) {
      report.invariants[i].target_defect = eval_invariant(tracked[i], grid_s, target.target) -
                                           eval_invariant(tracked[i], grid_s, target.current);
    }

    TengOptions teng = config.teng;
    teng.seed = config.teng.seed + std::uint64_t(step) * 1000003u;
    const TengResult updated =
        config.tangent_projection
            ? tangent_projected_update(net, theta, grid_s, target.target, gradients, teng)
            : teng_update(net, theta, grid_s, target.target, teng);
    report.teng = updated.report;
    if (updated.report.status == TengStatus::no_progress && strict) {
      throw Error(ErrorKind::no_progress,
                  "TENG update made no progress at step " + std::to_string(step));
    }
    FlatParams next = updated.theta;

    if (config.manifold_projection) {
      ProjectionResult proj = project(net, next, grid_m, projected, proj_anchors, config.projection);
      if (proj.report.status != ProjectionStatus::converged && strict) {
        throw Error(proj.report.status == ProjectionStatus::singular_gram
                        ? ErrorKind::singular_gram
                        : ErrorKind::projection_not_converged,
                    "projection " + std::string(to_string(proj.report.status)) + " at step " +
                        std::to_string(step));
      }
      report.projection = proj.report;
      next = std::move(proj.theta);
    }

    theta = std::move(next);
    t += report.gamma * config.dt;
    report.t = t;
    prev = emit(report, theta, prev);
  }
  result.theta_final = theta;
  result.t_final = t;
  return result;
}

void write_step_csv_header(std::ostream& out, const std::vector<InvariantSpec>& invariants) {
  out << "step,t,gamma,teng_iters,teng_residual,proj_iters,proj_status";
  for (const auto& inv : invariants) {
    out << ",inv_" << inv.name << "_value,inv_" << inv.name << "_drift_init,inv_" << inv.name
        << "_drift_prev";
  }
  out << ",rel_error\n";
}

void write_step_csv_row(std::ostream& out, const StepReport& s) {
  out << s.step << ',' << format_double(s.t) << ',' << format_double(s.gamma) << ','
      << s.teng.sub_iterations << ',' << format_double(s.teng.final_residual) << ',';
  if (s.projection) {
    out << s.projection->iterations << ',' << to_string(s.projection->status);
  } else {
    out << "0," << (s.step == 0 ? "initial" : "off");
  }
  for (const auto& inv : s.invariants) {
    out << ',' << format_double(inv.value) << ',' << format_double(inv.drift_init) << ','
        << format_double(inv.drift_prev);
  }
  out << ',';
  if (s.relative_error) out << format_double(*s.relative_error);
  out << '\n';
}

SnapshotSeries to_series(const ReferenceSolution& reference) {
  SnapshotSeries series;
  for (std::size_t i = 0; i < reference.times.size(); ++i) {
    series.push_back({reference.times[i], reference.x, reference.snapshots[i]});
  }
  return series;
}

void write_snapshot_csv(const std::filesystem::path& path, const SnapshotSeries& series) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::io, "cannot write " + path.string());
  out << "t,x,component,value\n";
  for (const auto& s : series) append_snapshot(out, s.t, s.x, s.values);
}

void write_reference_csv(const std::filesystem::path& path, const ReferenceSolution& reference) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::io, "cannot write " + path.string());
  const Eigen::Index comps = reference.snapshots.empty() ? 1 : reference.snapshots[0].rows();
  out << "t,x";
  for (Eigen::Index c = 0; c < comps; ++c) out << ",u" << c;
  out << '\n';
  for (std::size_t i = 0; i < reference.times.size(); ++i) {
    for (Eigen::Index p = 0; p < reference.x.size(); ++p) {
      out << format_double(reference.times[i]) << ',' << format_double(reference.x[p]);
      for (Eigen::Index c = 0; c < comps; ++c) out << ',' << format_double(reference.snapshots[i](c, p));
      out << '\n';
    }
  }
}

void write_comparison_csv(const std::filesystem::path& path, const std::vector<ComparisonRow>& rows) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::io, "cannot write " + path.string());
  out << "t,t_reference,gap,rel_error\n";
  for (const auto& r : rows) {
    out << format_double(r.t_run) << ',' << format_double(r.t_reference) << ','
        << format_double(r.gap) << ',' << format_double(r.relative_error) << '\n';
  }
}

SnapshotSeries read_snapshots(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::io, path.string() + " is empty");
  const auto header = split(line, ',');
  if (header.size() < 3 || header[0] != "t" || header[1] != "x") {
    throw Error(ErrorKind::io, path.string() + ": expected a t,x,... header");
  }
  const bool long_form = header.size() == 4 && header[2] == "component" && header[3] == "value";

  // time -> (x -> component values), keeping first-seen order of times and points.
  std::vector<double> times;
  std::map<double, std::vector<std::pair<double, std::vector<double>>>> rows;
  std::map<double, std::map<double, std::size_t>> index;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != header.size()) {
      throw Error(ErrorKind::io, path.string() + ":" + std::to_string(lineno) + ": wrong column count");
    }
    std::vector<double> v;
    for (const auto& c : cells) v.push_back(parse_double(path.string(), c));
    const double t = v[0], x = v[1];
    if (!rows.count(t)) times.push_back(t);
    auto& pts = rows[t];
    auto& idx = index[t];
    auto it = idx.find(x);
    if (it == idx.end()) {
      it = idx.emplace(x, pts.size()).first;
      pts.push_back({x, {}});
    }
    auto& comps = pts[it->second].second;
    if (long_form) {
      const auto c = std::size_t(v[2]);
      if (comps.size() <= c) comps.resize(c + 1, 0.0);
      comps[c] = v[3];
    } else {
      comps.assign(v.begin() + 2, v.end());
    }
  }
  SnapshotSeries series;
  for (double t : times) {
    const auto& pts = rows[t];
    Snapshot s;
    s.t = t;
    s.x.resize(Eigen::Index(pts.size()));
    const Eigen::Index comps = Eigen::Index(pts.front().second.size());
    s.values.resize(comps, Eigen::Index(pts.size()));
    for (std::size_t p = 0; p < pts.size(); ++p) {
      if (Eigen::Index(pts[p].second.size()) != comps) {
        throw Error(ErrorKind::io, path.string() + ": inconsistent component count");
      }
      s.x[Eigen::Index(p)] = pts[p].first;
      for (Eigen::Index c = 0; c < comps; ++c) s.values(c, Eigen::Index(p)) = pts[p].second[std::size_t(c)];
    }
    series.push_back(std::move(s));
  }
  return series;
}

std::vector<ComparisonRow> compare(const SnapshotSeries& run, const SnapshotSeries& reference,
                                   double a, double length, double dt) {
  if (reference.empty()) throw Error(ErrorKind::misaligned_times, "reference has no snapshots");
  std::vector<ComparisonRow> rows;
  for (const auto& s : run) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < reference.size(); ++i) {
      if (std::abs(reference[i].t - s.t) < std::abs(reference[best].t - s.t)) best = i;
    }
    const Snapshot& r = reference[best];
    const double gap = std::abs(r.t - s.t);
    if (gap > dt * (1.0 + 1e-9)) {
      throw Error(ErrorKind::misaligned_times,
                  "no reference snapshot within dt of t = " + format_double(s.t));
    }
    Field ref_values;
    const bool same_points = r.x.size() == s.x.size() && (r.x - s.x).cwiseAbs().maxCoeff() <= 1e-12;
    if (same_points) {
      ref_values = r.values;
    } else {
      const double x0 = r.x.size() ? r.x[0] : a;
      ref_values.resize(r.values.rows(), s.x.size());
      for (Eigen::Index c = 0; c < r.values.rows(); ++c) {
        ref_values.row(c) =
            trig_interpolate(r.values.row(c).transpose(), x0, length, s.x).transpose();
      }
    }
    rows.push_back({s.t, r.t, gap, relative_error(s.values, ref_values)});
  }
  return rows;
}

std::vector<ConservationSummary> summarize_steps(const std::filesystem::path& step_csv) {
  std::ifstream in(step_csv);
  if (!in) throw Error(ErrorKind::io, "cannot open " + step_csv.string());
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::io, step_csv.string() + " is empty");
  const auto header = split(line, ',');
  std::vector<ConservationSummary> out;
  std::vector<std::pair<std::size_t, std::size_t>> cols;  // (drift_init, drift_prev)
  for (std::size_t i = 0; i < header.size(); ++i) {
    const std::string& h = header[i];
    const std::string suffix = "_drift_init";
    if (h.rfind("inv_", 0) == 0 && h.size() > suffix.size() &&
        h.compare(h.size() - suffix.size(), suffix.size(), suffix) == 0) {
      out.push_back({h.substr(4, h.size() - 4 - suffix.size()), 0.0, 0.0});
      cols.emplace_back(i, i + 1);
    }
  }
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto cells = split(line, ',');
    for (std::size_t j = 0; j < cols.size(); ++j) {
      if (cols[j].second >= cells.size()) throw Error(ErrorKind::io, "truncated step CSV row");
      out[j].max_abs_drift_init = std::max(
          out[j].max_abs_drift_init, std::abs(parse_double("drift", cells[cols[j].first])));
      out[j].max_abs_drift_prev = std::max(
          out[j].max_abs_drift_prev, std::abs(parse_double("drift", cells[cols[j].second])));
    }
  }
  return out;
}

}  // namespace rpteng
