#include "rpteng/integrators.hpp"

#include <cmath>
#include <vector>

#include "rpteng/ad_engine.hpp"
#include "rpteng/error.hpp"
#include "rpteng/spectral.hpp"

namespace rpteng {

bool ButcherTableau::is_explicit() const {
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = i; j < a.cols(); ++j) {
      if (a(i, j) != 0.0) return false;
    }
  }
  return true;
}

namespace {

ButcherTableau make_tableau(std::string name, Eigen::MatrixXd a, Eigen::VectorXd b, int order) {
  ButcherTableau t;
  t.name = std::move(name);
  t.c = a.rowwise().sum();
  t.a = std::move(a);
  t.b = std::move(b);
  t.order = order;
  return t;
}

}  // namespace

ButcherTableau explicit_euler() {
  return make_tableau("euler", Eigen::MatrixXd::Zero(1, 1), Eigen::VectorXd::Ones(1), 1);
}

ButcherTableau classical_rk4() {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(4, 4);
  a(1, 0) = 0.5;
  a(2, 1) = 0.5;
  a(3, 2) = 1.0;
  Eigen::VectorXd b(4);
  b << 1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0;
  return make_tableau("rk4", a, b, 4);
}

ButcherTableau implicit_midpoint() {
  return make_tableau("implicit-midpoint", Eigen::MatrixXd::Constant(1, 1, 0.5),
                      Eigen::VectorXd::Ones(1), 2);
}

ButcherTableau dormand_prince() {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(7, 7);
  a(1, 0) = 1.0 / 5.0;
  a(2, 0) = 3.0 / 40.0;
  a(2, 1) = 9.0 / 40.0;
  a(3, 0) = 44.0 / 45.0;
  a(3, 1) = -56.0 / 15.0;
  a(3, 2) = 32.0 / 9.0;
  a(4, 0) = 19372.0 / 6561.0;
  a(4, 1) = -25360.0 / 2187.0;
  a(4, 2) = 64448.0 / 6561.0;
  a(4, 3) = -212.0 / 729.0;
  a(5, 0) = 9017.0 / 3168.0;
  a(5, 1) = -355.0 / 33.0;
  a(5, 2) = 46732.0 / 5247.0;
  a(5, 3) = 49.0 / 176.0;
  a(5, 4) = -5103.0 / 18656.0;
  a(6, 0) = 35.0 / 384.0;
  a(6, 2) = 500.0 / 1113.0;
  a(6, 3) = 125.0 / 192.0;
  a(6, 4) = -2187.0 / 6784.0;
  a(6, 5) = 11.0 / 84.0;
  Eigen::VectorXd b = a.row(6).transpose();
  return make_tableau("dormand-prince", a, b, 5);
}

ButcherTableau tableau_by_name(std::string_view name) {
  if (name == "euler") return explicit_euler();
  if (name == "rk4") return classical_rk4();
  if (name == "implicit-midpoint") return implicit_midpoint();
  if (name == "dormand-prince" || name == "dp5") return dormand_prince();
  throw Error(ErrorKind::invalid_argument, "unknown tableau '" + std::string(name) + "'");
}

Field rk_increment(const ButcherTableau& tableau, const RhsFunction& rhs, const Field& u,
                   double dt, const Field* first_stage) {
  if (!tableau.is_explicit()) {
    throw Error(ErrorKind::implicit_tableau, tableau.name + " is implicit");
  }
  const int s = tableau.stages();
  std::vector<Field> k(s);
  for (int i = 0; i < s; ++i) {
    if (i == 0 && first_stage != nullptr) {
      k[0] = *first_stage;
      continue;
    }
    Field y = u;
    for (int j = 0; j < i; ++j) {
      if (tableau.a(i, j) != 0.0) y += (dt * tableau.a(i, j)) * k[j];
    }
    k[i] = rhs(y);
  }
  Field d = Field::Zero(u.rows(), u.cols());
  for (int i = 0; i < s; ++i) {
    if (tableau.b[i] != 0.0) d += tableau.b[i] * k[i];
  }
  return d;
}

QuadraticCondition check_quadratic_condition(const ButcherTableau& tableau) {
  const int s = tableau.stages();
  double worst = 0.0;
  for (int i = 0; i < s; ++i) {
    for (int j = 0; j < s; ++j) {
      const double lhs = tableau.b[i] * tableau.a(i, j) + tableau.b[j] * tableau.a(j, i);
      worst = std::max(worst, std::abs(lhs - tableau.b[i] * tableau.b[j]));
    }
  }
  return {worst <= 1e-14, worst};
}

namespace {

double weighted_inner(const QuadratureGrid& grid, const Field& x, const Field& y) {
  return grid.weights.dot(x.cwiseProduct(y).colwise().sum().transpose());
}

}  // namespace

RelaxationResult relax_solve(const InvariantSpec& inv, const QuadratureGrid& grid, const Field& u,
                             const Field& d, double dt, const RelaxationOptions& options) {
  if (inv.degree() < 2) {
    throw Error(ErrorKind::linear_invariant,
                "relaxation needs a quadratic or higher invariant; '" + inv.name + "' is linear");
  }
  if (!(dt > 0.0)) throw Error(ErrorKind::invalid_argument, "relax_solve: dt must be positive");
  if (u.cols() != grid.n || d.cols() != grid.n || u.rows() != d.rows()) {
    throw Error(ErrorKind::length_mismatch, "relax_solve: fields do not match the grid");
  }

  RelaxationResult result;
  const double dd = weighted_inner(grid, d, d);
  if (dd <= 1e-30) {
    result.status = RelaxationStatus::degenerate_direction;
    return result;
  }

  const double base = eval_invariant(inv, grid, u);
  const double tolerance = options.relative_tolerance * std::max(1.0, std::abs(base));
  auto residual = [&](double g) { return eval_invariant(inv, grid, u + (g * dt) * d) - base; };
  auto slope = [&](double g) {
    const Field kp = density_gradient(inv, u + (g * dt) * d);
    return dt * weighted_inner(grid, kp, d);
  };

  double gamma = 1.0;
  bool solved = false;
  if (options.method == RelaxationMethod::closed_form) {
    // I(u + g dt d) - I(u) = scale (2 g dt <u,d> + g^2 dt^2 <d,d>); the nonzero root.
    gamma = -2.0 * weighted_inner(grid, u, d) / (dt * dd);
    result.residual = residual(gamma);
    solved = std::abs(result.residual) <= tolerance;
  }
  // Newton from gamma = 1 (or as a polish of the closed form), then bisection on [0.5, 1.5].
  if (!solved) {
    for (int it = 0; it < options.newton_max_iterations; ++it) {
      const double f = residual(gamma);
      result.residual = f;
      if (std::abs(f) <= tolerance) {
        solved = true;
        break;
      }
      const double df = slope(gamma);
      ++result.iterations;
      if (df == 0.0 || !std::isfinite(df)) break;
      gamma -= f / df;
      if (!(gamma > 0.5 && gamma < 1.5)) break;
    }
    if (!solved) {
      double lo = 0.5, hi = 1.5;
      double flo = residual(lo), fhi = residual(hi);
      if (flo * fhi <= 0.0) {
        for (int it = 0; it < options.bisection_max_iterations; ++it) {
          ++result.bisection_iterations;
          const double mid = 0.5 * (lo + hi);
          const double fm = residual(mid);
          gamma = mid;
          result.residual = fm;
          if (std::abs(fm) <= tolerance) {
            solved = true;
            break;
          }
          if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
          } else {
            hi = mid;
          }
        }
      } else {
        // No sign change on [0.5, 1.5]: report the Newton iterate, range check decides.
        result.residual = residual(gamma);
      }
    }
  }
  result.gamma = gamma;
  if (!std::isfinite(gamma) || std::abs(gamma - 1.0) > options.max_deviation) {
    throw Error(ErrorKind::relaxation_out_of_range,
                "gamma = " + std::to_string(gamma) + " is too far from 1; reduce dt");
  }
  if (!solved) result.status = RelaxationStatus::residual_above_tolerance;
  return result;
}

RelaxedTarget build_relaxed_target(const NetworkSpec& net, const FlatParams& theta,
                                   const QuadratureGrid& grid, const ProblemSpec& problem,
                                   const ButcherTableau& tableau, double dt,
                                   const InvariantSpec* relax, const RelaxationOptions& options) {
  if (!(dt > 0.0)) throw Error(ErrorKind::invalid_argument, "dt must be positive");
  const FieldJets jets = jets_on_points(net, theta, grid.points, problem.rhs_order);
  RelaxedTarget out;
  out.current = jets.d0;
  const Field first = evaluate_rhs(problem, jets);
  const double length = grid.length();
  const RhsFunction stage_rhs = [&](const Field& y) {
    return evaluate_rhs(problem, spectral_jets(y, length, problem.rhs_order));
  };
  out.increment = rk_increment(tableau, stage_rhs, out.current, dt, &first);
  if (relax != nullptr) {
    out.relaxation = relax_solve(*relax, grid, out.current, out.increment, dt, options);
    out.gamma = out.relaxation->gamma;
  }
  out.target = out.current + (out.gamma * dt) * out.increment;
  return out;
}

}  // namespace rpteng
