// Acceptance runs: `rpteng_acceptance <id>...` with ids 1-9 or 5s (short KdV horizon).
// Prints one PASS/FAIL line per criterion and exits non-zero if any failed.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rpteng/ad_engine.hpp"
#include "rpteng/driver.hpp"
#include "rpteng/error.hpp"
#include "rpteng/integrators.hpp"
#include "rpteng/invariants.hpp"
#include "rpteng/manifold_projection.hpp"
#include "rpteng/network.hpp"
#include "rpteng/problems.hpp"
#include "rpteng/quadrature.hpp"
#include "rpteng/spectral.hpp"
#include "rpteng/teng.hpp"
#include "support.hpp"

using namespace rpteng;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

const fs::path out_dir = "acceptance-out";

/// Fits are deterministic in (problem, seed, n_S), so one fit serves every run of a problem.
FlatParams fitted(const RunConfig& c) {
  const fs::path cache = out_dir / ("fit_" + c.problem + "_s" + std::to_string(c.seed) + "_n" +
                                    std::to_string(c.n_sample) + ".params");
  if (fs::exists(cache)) return load_params(cache, c.network);
  const ProblemSpec p = make_problem(c.problem, c.problem_options);
  const FitResult fit = fit_initial(c.network, p, make_grid(p.a, p.b, c.n_sample), c.seed,
                                    c.fit_tolerance, c.fit_max_iterations);
  std::printf("  fit %s: relative error %s after %d iterations (seed %llu)\n", c.problem.c_str(),
              sci(fit.report.relative_error).c_str(), fit.report.iterations,
              static_cast<unsigned long long>(fit.report.seed_used));
  save_params(cache, c.network, fit.theta);
  return fit.theta;
}

RunResult run_logged(RunConfig c, const std::string& tag) {
  if (!c.initial_params) c.initial_params = fitted(c);
  c.output = out_dir / (tag + ".csv");
  const auto start = std::chrono::steady_clock::now();
  RunResult r = run(c);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("  run %-22s %5zu steps, t = %.6f, %.0f s\n", tag.c_str(), r.steps.size() - 1,
              r.t_final, secs);
  std::fflush(stdout);
  return r;
}

std::size_t invariant_index(const RunResult& r, const std::string& name) {
  const auto& invs = r.steps.front().invariants;
  for (std::size_t i = 0; i < invs.size(); ++i) {
    if (invs[i].name == name) return i;
  }
  throw std::runtime_error("run does not track " + name);
}

double max_drift(const RunResult& r, const std::string& name) {
  const std::size_t inv = invariant_index(r, name);
  double m = 0.0;
  for (const StepReport& s : r.steps) m = std::max(m, std::abs(s.invariants[inv].drift_init));
  return m;
}

double max_target_defect(const RunResult& r, const std::string& name, std::size_t last_step) {
  const std::size_t inv = invariant_index(r, name);
  double m = 0.0;
  for (std::size_t k = 1; k < r.steps.size() && k <= last_step; ++k) {
    m = std::max(m, std::abs(r.steps[k].invariants[inv].target_defect));
  }
  return m;
}

RunConfig vanilla(RunConfig c) {
  c.relaxation = false;
  c.tangent_projection = false;
  c.manifold_projection = false;
  return c;
}

// ---------------------------------------------------------------------------------------------

Verdict burgers_mass() {
  const RunConfig base = default_config("burgers");
  const double projected = max_drift(run_logged(base, "c1_burgers_projected"), "mass");
  const double plain = max_drift(run_logged(vanilla(base), "c1_burgers_vanilla"), "mass");
  return {projected <= 1e-12 && plain >= 1e-9 && plain <= 1e-5,
          "projected max mass drift " + sci(projected) + " (<= 1e-12), vanilla " + sci(plain) +
              " (in [1e-9, 1e-5])"};
}

Verdict burgers_refinement() {
  const RunConfig base = default_config("burgers");
  RunConfig fine = vanilla(base);
  fine.dt = 1e-3;
  const double plain = max_drift(run_logged(fine, "c2_burgers_vanilla_dt1e-3"), "mass");
  const double projected = max_drift(run_logged(base, "c2_burgers_projected"), "mass");
  return {plain > 1e-9 && projected <= 1e-12,
          "vanilla dt=1e-3 max mass drift " + sci(plain) + " (> 1e-9), projected dt=5e-3 " +
              sci(projected) + " (<= 1e-12)"};
}

struct KdvPair {
  RunResult relaxed;
  RunResult plain;
};

const KdvPair& kdv_short() {
  static std::optional<KdvPair> cached;
  if (!cached) {
    RunConfig c = default_config("kdv");
    c.t_end = 1.0;
    RunConfig off = c;
    off.relaxation = false;
    cached = KdvPair{run_logged(c, "c3_kdv_relaxed"), run_logged(off, "c3_kdv_unrelaxed")};
  }
  return *cached;
}

Verdict kdv_target_energy() {
  const KdvPair& runs = kdv_short();
  const double relaxed = max_target_defect(runs.relaxed, "energy", runs.relaxed.steps.size());
  const double plain = max_target_defect(runs.plain, "energy", 200);
  return {relaxed <= 1e-13 && plain > 1e-10,
          "relaxed max |I(u_target) - I(u_n)| " + sci(relaxed) + " (<= 1e-13), unrelaxed " +
              sci(plain) + " (> 1e-10 within 200 steps)"};
}

Verdict kdv_gamma() {
  const RunResult& r = kdv_short().relaxed;
  double worst = 0.0;
  for (std::size_t k = 1; k < r.steps.size(); ++k) worst = std::max(worst, std::abs(r.steps[k].gamma - 1.0));
  return {worst <= 1e-8 && r.t_final >= 1.0 - 1e-9,
          "max |gamma - 1| " + sci(worst) + " over t in [0, " + std::to_string(r.t_final) +
              "] (<= 1e-8)"};
}

Verdict kdv_long(double t_end) {
  RunConfig c = default_config("kdv");
  c.t_end = t_end;
  const std::string tag = t_end >= 10.0 ? "c5_kdv" : "c5s_kdv";
  const double rp = max_drift(run_logged(c, tag + "_rp"), "energy");
  const double plain = max_drift(run_logged(vanilla(c), tag + "_vanilla"), "energy");
  return {rp <= 1e-11 && plain >= 1e-8,
          "t in [0, " + std::to_string(int(t_end)) + "]: RP max energy drift " + sci(rp) +
              " (<= 1e-11), vanilla " + sci(plain) + " (>= 1e-8)"};
}

Verdict wave_accuracy() {
  const RunConfig c = default_config("wave");
  const RunResult rp = run_logged(c, "c6_wave_rp");
  const RunResult plain = run_logged(vanilla(c), "c6_wave_vanilla");
  const double e_rp = rp.steps.back().relative_error.value_or(NAN);
  const double e_plain = plain.steps.back().relative_error.value_or(NAN);
  return {e_rp >= 1e-3 && e_rp <= 5e-3 && e_rp <= e_plain,
          "relative L2 error at t = " + std::to_string(rp.t_final) + ": RP " + sci(e_rp) +
              " (in [1e-3, 5e-3]), vanilla " + sci(e_plain) + ", RP - vanilla " +
              sci(e_rp - e_plain) + " (<= 0)"};
}

Verdict wave_long() {
  RunConfig c = default_config("wave");
  c.t_end = 5.0;
  c.compute_error = false;
  const RunResult r = run_logged(c, "c7_wave_rp_t5");
  const double drift = max_drift(r, "hamiltonian");
  return {drift <= 1e-10 && r.t_final >= 5.0 - 1e-9,
          "RP max Hamiltonian drift over [0, 5] " + sci(drift) + " (<= 1e-10)"};
}

// ---------------------------------------------------------------------------------------------
// Property suite: independent oracles against the library.

struct Checks {
  std::vector<std::string> failed;
  void expect(bool ok, const std::string& what) {
    if (!ok) failed.push_back(what);
  }
};

void prop_ad(Checks& ck) {
  for (Activation act : {Activation::tanh, Activation::sin}) {
    const NetworkSpec net = test::small_spec(act, 2, 2.0);
    for (int k = 0; k < 20; ++k) {
      const FlatParams theta = test::random_params(net, 7000 + k);
      const double x = test::random_vector(1, 8000 + k)[0];
      const auto g = param_gradient(net, theta, x);
      for (int c = 0; c < 2; ++c) {
        double worst = 0.0;
        for (Eigen::Index i = 0; i < theta.size(); ++i) {
          FlatParams tp = theta, tm = theta;
          tp[i] += 1e-6;
          tm[i] -= 1e-6;
          const double fd = (forward(net, tp, x)[c] - forward(net, tm, x)[c]) / 2e-6;
          worst = std::max(worst, std::abs(fd - g[c].grad[i]));
        }
        ck.expect(worst <= 1e-6 * std::max(1.0, g[c].grad.cwiseAbs().maxCoeff()),
                  "AD gradient vs finite differences");
      }
    }
  }
}

void prop_quadrature(Checks& ck) {
  // Trapezoid on a periodic grid integrates e^{sin(pi x)} spectrally; oracle: 2 I_0(1).
  const double oracle = 2.0 * std::cyl_bessel_i(0.0, 1.0);
  auto err = [&](int n) {
    const QuadratureGrid g = make_grid(-1.0, 1.0, n);
    return std::abs(integrate(g, (EIGEN_PI * g.points.array()).sin().exp().matrix()) - oracle);
  };
  ck.expect(err(8) <= 1e-6, "quadrature error at n = 8");
  ck.expect(err(16) <= 1e-13, "quadrature reaches machine precision at n = 16");
}

void prop_tableaux(Checks& ck) {
  ck.expect(!check_quadratic_condition(explicit_euler()).holds, "Euler quadratic condition false");
  ck.expect(!check_quadratic_condition(classical_rk4()).holds, "RK4 quadratic condition false");
  ck.expect(check_quadratic_condition(implicit_midpoint()).holds,
            "implicit midpoint quadratic condition true");
}

void prop_relaxation(Checks& ck) {
  const QuadratureGrid g = make_grid(0.0, 1.0, 24);
  for (int k = 0; k < 20; ++k) {
    const Field d = test::random_vector(24, 9100 + k).transpose();
    Field u = test::random_vector(24, 9200 + k).transpose();
    const double dt = 0.01, dd = d.squaredNorm();
    u -= ((u.cwiseProduct(d).sum() + 0.5 * dt * (1.0 + 0.005 * k) * dd) / dd) * d;
    // F(gamma) accumulated in long double, then bisected.
    auto defect = [&](double gamma) {
      long double acc = 0.0L;
      for (Eigen::Index i = 0; i < 24; ++i) {
        const long double a = u(0, i), b = a + (long double)gamma * dt * d(0, i);
        acc += (long double)g.weights[i] * (b * b - a * a);
      }
      return double(acc);
    };
    const double oracle = test::bisect(defect, 0.8, 1.3);
    RelaxationOptions opts;
    opts.max_deviation = 0.5;
    const double gamma = relax_solve(energy_invariant(), g, u, d, dt, opts).gamma;
    ck.expect(std::abs(gamma - oracle) <= 1e-12, "relaxation closed form vs bisection");
  }
}

void prop_least_squares(Checks& ck) {
  for (int k = 0; k < 10; ++k) {
    const Eigen::VectorXd flat = test::random_vector(50 * 14, 9300 + k);
    const Eigen::MatrixXd j = Eigen::Map<const Eigen::MatrixXd>(flat.data(), 50, 14);
    const Eigen::VectorXd r = test::random_vector(50, 9400 + k);
    const Eigen::VectorXd qr = j.householderQr().solve(r);
    const LsSolution s = truncated_svd_solve(j, r, 1e-12);
    ck.expect(std::abs((j * s.delta - r).norm() - (j * qr - r).norm()) <= 1e-10,
              "least squares residual vs QR");
    // Rank-deficient: compare with the complete-orthogonal-decomposition pseudoinverse.
    Eigen::MatrixXd low = j;
    low.rightCols(7) = j.leftCols(7) * Eigen::Map<const Eigen::MatrixXd>(
                                           test::random_vector(49, 9500 + k).data(), 7, 7);
    const Eigen::VectorXd pinv = low.completeOrthogonalDecomposition().pseudoInverse() * r;
    ck.expect((truncated_svd_solve(low, r, 1e-10).delta - pinv).norm() <= 1e-10 * pinv.norm(),
              "least squares vs pseudoinverse on a rank-deficient system");
  }
}

void prop_projection(Checks& ck) {
  const NetworkSpec net = test::small_spec(Activation::tanh, 2);
  const QuadratureGrid g = make_grid(-1.0, 1.0, 64);
  const std::vector<InvariantSpec> invs{mass_invariant(), hamiltonian_invariant()};
  ProjectionOptions opts;
  for (int k = 0; k < 8; ++k) {
    const FlatParams theta0 = test::random_params(net, 9600 + k);
    const Eigen::VectorXd anchors = invariant_values(net, theta0, g, invs);
    const FlatParams moved = theta0 + 1e-3 * test::random_vector(theta0.size(), 9700 + k);
    const ProjectionResult once = project(net, moved, g, invs, anchors, opts);
    const ProjectionResult twice = project(net, once.theta, g, invs, anchors, opts);
    const Eigen::VectorXd v1 = invariant_values(net, once.theta, g, invs);
    const Eigen::VectorXd v2 = invariant_values(net, twice.theta, g, invs);
    for (Eigen::Index j = 0; j < anchors.size(); ++j) {
      const double tol = opts.relative_tolerance * std::max(1.0, std::abs(anchors[j]));
      ck.expect(once.report.status == ProjectionStatus::converged &&
                    std::abs(v1[j] - anchors[j]) <= tol,
                "projection feasibility");
      ck.expect(std::abs(v2[j] - v1[j]) <= 10.0 * tol, "projection idempotence");
    }
  }
}

void prop_tangent(Checks& ck) {
  const NetworkSpec net = test::small_spec(Activation::sin);
  const QuadratureGrid g = make_grid(-1.0, 1.0, 64);
  for (int k = 0; k < 8; ++k) {
    const FlatParams theta = test::random_params(net, 9800 + k);
    const Field target =
        forward(net, theta + 0.01 * test::random_vector(theta.size(), 9900 + k), g.points);
    const GradientProvider grads = [&](const FlatParams& t) {
      return std::vector<Eigen::VectorXd>{invariant_theta_gradient(energy_invariant(), net, t, g)};
    };
    TengOptions opts;
    opts.max_iterations = 1;
    const Eigen::VectorXd step = tangent_projected_update(net, theta, g, target, grads, opts).theta - theta;
    const Eigen::VectorXd gv = grads(theta)[0];
    ck.expect(std::abs(gv.dot(step)) <= 1e-12 * gv.norm() * step.norm(), "tangent orthogonality");
  }
}

void prop_order(Checks& ck) {
  const ProblemSpec p = make_problem(ProblemKind::kdv);
  const QuadratureGrid grid = make_grid(p.a, p.b, 128);
  const Field u0 = initial_field(p, grid.points);
  const RhsFunction rhs = [&p](const Field& y) { return spectral_rhs(p, y); };
  std::vector<double> err;
  for (double dt : {4e-3, 2e-3, 1e-3}) {
    Field u = u0;
    double t = 0.0;
    while (t < 0.1 - 1e-12) {
      const Field d = rk_increment(classical_rk4(), rhs, u, dt);
      const double gamma = relax_solve(energy_invariant(), grid, u, d, dt).gamma;
      u += gamma * dt * d;
      t += gamma * dt;
    }
    Field ref = u0;
    const int steps = 4000;
    for (int i = 0; i < steps; ++i) ref += (t / steps) * rk_increment(dormand_prince(), rhs, ref, t / steps);
    err.push_back((u - ref).norm());
  }
  ck.expect(std::log2(err[0] / err[1]) >= 3.8 && std::log2(err[1] / err[2]) >= 3.8,
            "relaxed RK4 observed order >= 4 (errors " + sci(err[0]) + ", " + sci(err[1]) + ", " +
                sci(err[2]) + ")");
}

Verdict property_suite() {
  Checks ck;
  const auto start = std::chrono::steady_clock::now();
  for (auto* f : {prop_ad, prop_quadrature, prop_tableaux, prop_relaxation, prop_least_squares,
                  prop_projection, prop_tangent, prop_order}) {
    f(ck);
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::string detail = "eight property groups in " + std::to_string(int(secs)) + " s";
  if (!ck.failed.empty()) detail += "; first failure: " + ck.failed.front();
  return {ck.failed.empty() && secs < 60.0, detail};
}

Verdict determinism() {
  RunConfig c = default_config("burgers");
  std::string bytes[2];
  for (int i = 0; i < 2; ++i) {
    c.output = out_dir / ("c9_burgers_run" + std::to_string(i) + ".csv");
    run(c);
    std::ifstream in(c.output, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    bytes[i] = ss.str();
  }
  return {!bytes[0].empty() && bytes[0] == bytes[1],
          "two full criterion-1 runs (fit included): " + std::to_string(bytes[0].size()) +
              " bytes, " + (bytes[0] == bytes[1] ? "identical" : "different")};
}

}  // namespace

int main(int argc, char** argv) {
  const std::map<std::string, std::pair<std::string, std::function<Verdict()>>> criteria{
      {"1", {"Burgers mass conservation", burgers_mass}},
      {"2", {"step refinement does not replace projection", burgers_refinement}},
      {"3", {"KdV target energy preservation", kdv_target_energy}},
      {"4", {"relaxation factor stays near one", kdv_gamma}},
      {"5", {"KdV long-horizon energy", [] { return kdv_long(10.0); }}},
      {"5s", {"KdV energy, short horizon", [] { return kdv_long(1.0); }}},
      {"6", {"acoustic wave accuracy", wave_accuracy}},
      {"7", {"wave Hamiltonian long run", wave_long}},
      {"8", {"property suite", property_suite}},
      {"9", {"determinism", determinism}},
  };
  std::vector<std::string> ids(argv + 1, argv + argc);
  if (ids.empty()) ids = {"8", "1", "2", "3", "4", "5s", "6", "9", "7", "5"};
  fs::create_directories(out_dir);

  int failures = 0;
  for (const std::string& id : ids) {
    const auto it = criteria.find(id);
    if (it == criteria.end()) {
      std::fprintf(stderr, "unknown criterion '%s'\n", id.c_str());
      return 2;
    }
    Verdict v;
    try {
      v = it->second.second();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    failures += !v.pass;
    std::printf("criterion %-2s %s: %s (%s)\n", id.c_str(), v.pass ? "PASS" : "FAIL",
                it->second.first.c_str(), v.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
