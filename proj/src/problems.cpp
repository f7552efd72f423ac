#include "rpteng/problems.hpp"

#include <cmath>

#include "rpteng/error.hpp"
#include "rpteng/integrators.hpp"
#include "rpteng/spectral.hpp"

namespace rpteng {

std::string_view to_string(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::burgers: return "burgers";
    case ProblemKind::kdv: return "kdv";
    case ProblemKind::wave: return "wave";
  }
  return "unknown";
}

ProblemSpec make_problem(ProblemKind kind, const ProblemOptions& options) {
  ProblemSpec p;
  p.kind = kind;
  p.name = std::string(to_string(kind));
  p.burgers_width = options.burgers_width;
  p.soliton_amplitude = options.soliton_amplitude;
  p.soliton_offset = options.soliton_offset;
  switch (kind) {
    case ProblemKind::burgers:
      p.a = -1.0;
      p.b = 1.0;
      p.components = 1;
      p.rhs_order = 1;
      p.invariants = {mass_invariant()};
      p.reference = ReferenceKind::spectral;
      break;
    case ProblemKind::kdv:
      p.a = 0.0;
      p.b = 80.0;
      p.components = 1;
      p.rhs_order = 3;
      p.invariants = {mass_invariant(), energy_invariant()};
      p.reference = ReferenceKind::analytic;
      break;
    case ProblemKind::wave:
      p.a = -1.0;
      p.b = 1.0;
      p.components = 2;
      p.rhs_order = 1;
      p.invariants = {hamiltonian_invariant()};
      p.reference = ReferenceKind::spectral;
      break;
  }
  return p;
}

ProblemSpec make_problem(std::string_view name, const ProblemOptions& options) {
  if (name == "burgers") return make_problem(ProblemKind::burgers, options);
  if (name == "kdv") return make_problem(ProblemKind::kdv, options);
  if (name == "wave") return make_problem(ProblemKind::wave, options);
  throw Error(ErrorKind::invalid_argument, "unknown problem '" + std::string(name) + "'");
}

double rhs_burgers(const Jet3<double>& u) { return -u.v0 * u.v1; }

double rhs_kdv(const Jet3<double>& u) { return -u.v0 * u.v1 - u.v3; }

std::pair<double, double> rhs_wave(const Jet3<double>& rho, const Jet3<double>& v) {
  return {-v.v1, -rho.v1};
}

Field evaluate_rhs(const ProblemSpec& problem, const FieldJets& jets) {
  if (jets.components() != problem.components) {
    throw Error(ErrorKind::length_mismatch, "field has " + std::to_string(jets.components()) +
                                                " components, problem " + problem.name + " needs " +
                                                std::to_string(problem.components));
  }
  switch (problem.kind) {
    case ProblemKind::burgers: return -(jets.d0.array() * jets.d1.array()).matrix();
    case ProblemKind::kdv: return -(jets.d0.array() * jets.d1.array()).matrix() - jets.d3;
    case ProblemKind::wave: {
      Field f(2, jets.points());
      f.row(0) = -jets.d1.row(1);
      f.row(1) = -jets.d1.row(0);
      return f;
    }
  }
  return {};
}

double analytic_kdv(double x, double t, double amplitude, double offset) {
  const double speed = amplitude / 3.0;
  const double arg = std::sqrt(3.0 * amplitude) * (x - speed * t - offset) / 6.0;
  const double sech = 1.0 / std::cosh(arg);
  return amplitude * sech * sech;
}

Eigen::VectorXd initial_condition(const ProblemSpec& problem, double x) {
  Eigen::VectorXd u(problem.components);
  switch (problem.kind) {
    case ProblemKind::burgers: {
      const double bx = problem.burgers_width * x;
      u[0] = 1.0 + 0.3 * std::exp(-bx * bx);
      break;
    }
    case ProblemKind::kdv:
      u[0] = analytic_kdv(x, 0.0, problem.soliton_amplitude, problem.soliton_offset);
      break;
    case ProblemKind::wave:
      u[0] = std::exp(-9.0 * x * x);
      u[1] = 0.0;
      break;
  }
  return u;
}

Field initial_field(const ProblemSpec& problem, const Eigen::Ref<const Eigen::VectorXd>& xs) {
  Field u(problem.components, xs.size());
  for (Eigen::Index p = 0; p < xs.size(); ++p) u.col(p) = initial_condition(problem, xs[p]);
  return u;
}

Field spectral_rhs(const ProblemSpec& problem, const Field& u) {
  const double length = problem.length();
  const Eigen::Index n = u.cols();
  Field f(u.rows(), n);
  switch (problem.kind) {
    case ProblemKind::burgers: {
      Eigen::VectorXd flux = 0.5 * u.row(0).transpose().array().square().matrix();
      // 2/3 rule: drop modes above n/3 before differentiating the quadratic flux.
      f.row(0) = -spectral_derivative(dealias_two_thirds(flux), length, 1).transpose();
      break;
    }
    case ProblemKind::kdv: {
      // Skew-symmetric split u u_x = ((u^2)_x + u u_x) / 3: with a skew derivative matrix the
      // discrete mass and energy are both exact invariants of the semi-discrete system.
      const Eigen::VectorXd row = u.row(0).transpose();
      const Eigen::VectorXd square = row.array().square().matrix();
      const Eigen::VectorXd advection =
          (spectral_derivative(square, length, 1).array() +
           row.array() * spectral_derivative(row, length, 1).array()) / 3.0;
      f.row(0) = -(advection.matrix() + spectral_derivative(row, length, 3)).transpose();
      break;
    }
    case ProblemKind::wave: {
      f.row(0) = -spectral_derivative(u.row(1).transpose(), length, 1).transpose();
      f.row(1) = -spectral_derivative(u.row(0).transpose(), length, 1).transpose();
      break;
    }
  }
  return f;
}

std::size_t ReferenceSolution::nearest(double t) const {
  if (times.empty()) throw Error(ErrorKind::misaligned_times, "reference has no snapshots");
  std::size_t best = 0;
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (std::abs(times[i] - t) < std::abs(times[best] - t)) best = i;
  }
  return best;
}

Field ReferenceSolution::at_points(std::size_t i, const Eigen::Ref<const Eigen::VectorXd>& xs) const {
  const Field& s = snapshots.at(i);
  Field out(s.rows(), xs.size());
  for (Eigen::Index c = 0; c < s.rows(); ++c) {
    out.row(c) = trig_interpolate(s.row(c).transpose(), a, length, xs).transpose();
  }
  return out;
}

ReferenceSolution spectral_reference(const ProblemSpec& problem, int n_grid, double dt,
                                     double t_end, int snapshot_every) {
  if (n_grid < 4 || !(dt > 0.0) || !(t_end >= 0.0) || snapshot_every < 1) {
    throw Error(ErrorKind::invalid_argument, "spectral_reference: bad grid/step arguments");
  }
  ReferenceSolution ref;
  ref.a = problem.a;
  ref.length = problem.length();
  ref.x.resize(n_grid);
  for (int i = 0; i < n_grid; ++i) ref.x[i] = problem.a + i * ref.length / n_grid;

  Field u = initial_field(problem, ref.x);
  ref.times.push_back(0.0);
  ref.snapshots.push_back(u);

  const ButcherTableau tableau = dormand_prince();
  const RhsFunction rhs = [&problem](const Field& y) { return spectral_rhs(problem, y); };
  const long steps = std::max(0L, long(std::ceil(t_end / dt - 1e-9)));
  for (long s = 1; s <= steps; ++s) {
    const double t_prev = (s - 1) * dt;
    const double h = s == steps ? t_end - t_prev : dt;
    u += h * rk_increment(tableau, rhs, u, h);
    if (!u.allFinite() || u.cwiseAbs().maxCoeff() > 1e6) {
      throw Error(ErrorKind::reference_diverged,
                  problem.name + " reference blew up at t=" + std::to_string(t_prev + h));
    }
    if (s % snapshot_every == 0 || s == steps) {
      ref.times.push_back(s == steps ? t_end : s * dt);
      ref.snapshots.push_back(u);
    }
  }
  return ref;
}

Field analytic_reference(const ProblemSpec& problem, double t,
                         const Eigen::Ref<const Eigen::VectorXd>& xs) {
  if (problem.kind != ProblemKind::kdv) {
    throw Error(ErrorKind::invalid_argument, problem.name + " has no analytic reference");
  }
  Field u(1, xs.size());
  for (Eigen::Index p = 0; p < xs.size(); ++p) {
    u(0, p) = analytic_kdv(xs[p], t, problem.soliton_amplitude, problem.soliton_offset);
  }
  return u;
}

}  // namespace rpteng
