#include "rpteng/teng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include <Eigen/QR>

#include "rpteng/ad_engine.hpp"
#include "rpteng/error.hpp"
#include "svd.hpp"

namespace rpteng {

namespace {

Eigen::VectorXd row_weights(const QuadratureGrid& grid, Eigen::Index components) {
  Eigen::VectorXd sw(grid.n * components);
  for (Eigen::Index p = 0; p < grid.n; ++p) {
    sw.segment(p * components, components).setConstant(std::sqrt(grid.weights[p]));
  }
  return sw;
}

LeastSquaresSystem weighted_system(const QuadratureGrid& grid, const JacobianEval& eval,
                                   const Field& du) {
  if (du.cols() != grid.n || du.rows() != eval.values.rows()) {
    throw Error(ErrorKind::length_mismatch, "increment field does not match grid/network");
  }
  const Eigen::VectorXd sw = row_weights(grid, du.rows());
  LeastSquaresSystem system;
  system.jacobian = sw.asDiagonal() * eval.jacobian;
  system.rhs = sw.cwiseProduct(du.reshaped());
  return system;
}

LsSolution solve_square_factor(const Eigen::MatrixXd& r, const Eigen::VectorXd& rhs, double rcond,
                               Eigen::VectorXd* y) {
  const detail::ThinSvd svd = detail::thin_svd(r);
  const Eigen::VectorXd& sigma = svd.sigma;
  LsSolution sol;
  sol.sigma_max = sigma.size() ? sigma[0] : 0.0;
  const double cutoff = rcond * sol.sigma_max;
  Eigen::VectorXd coeff = svd.u.transpose() * rhs;
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    if (sigma[i] > cutoff && sigma[i] > 0.0) {
      coeff[i] /= sigma[i];
      ++sol.rank;
    } else {
      coeff[i] = 0.0;
      ++sol.truncated;
    }
  }
  *y = svd.v * coeff;
  return sol;
}

}  // namespace

double weighted_norm(const QuadratureGrid& grid, const Field& field) {
  if (field.cols() != grid.n) throw Error(ErrorKind::length_mismatch, "weighted_norm: bad field");
  return std::sqrt(grid.weights.dot(field.colwise().squaredNorm().transpose()));
}

LeastSquaresSystem assemble_system(const NetworkSpec& net, const FlatParams& theta,
                                   const QuadratureGrid& grid, const Field& du) {
  return weighted_system(grid, parameter_jacobian(net, theta, grid.points), du);
}

LsSolution truncated_svd_solve(const Eigen::Ref<const Eigen::MatrixXd>& a,
                               const Eigen::Ref<const Eigen::VectorXd>& r, double rcond) {
  if (a.rows() != r.size()) throw Error(ErrorKind::length_mismatch, "solve: rhs length mismatch");
  const Eigen::Index m = a.rows(), n = a.cols();
  LsSolution sol;
  if (m == 0 || n == 0) {
    sol.delta = Eigen::VectorXd::Zero(n);
    return sol;
  }
  // Reduce to a square triangular factor first; the SVD of R carries the singular values of A.
  if (m >= n) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
    const Eigen::MatrixXd rfac = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
    const Eigen::VectorXd qtr = (qr.householderQ().transpose() * r).head(n);
    Eigen::VectorXd delta;
    sol = solve_square_factor(rfac, qtr, rcond, &delta);
    sol.delta = std::move(delta);
  } else {
    // A^T = Q R, so A = R^T Q^T and the minimal-norm solution lives in range(Q).
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(a.transpose());
    const Eigen::MatrixXd rt =
        qr.matrixQR().topRows(m).triangularView<Eigen::Upper>().toDenseMatrix().transpose();
    Eigen::VectorXd y;
    sol = solve_square_factor(rt, r, rcond, &y);
    Eigen::VectorXd padded = Eigen::VectorXd::Zero(n);
    padded.head(m) = y;
    sol.delta = qr.householderQ() * padded;
  }
  return sol;
}

LsSolution solve_ls(const LeastSquaresSystem& system) {
  if (system.solver == LsSolver::truncated_svd) {
    return truncated_svd_solve(system.jacobian, system.rhs, system.rcond);
  }
  const Eigen::Index m = system.jacobian.rows();
  const Eigen::Index s = std::min<Eigen::Index>(m, 4 * system.jacobian.cols());
  if (s == m) return truncated_svd_solve(system.jacobian, system.rhs, system.rcond);
  std::vector<Eigen::Index> rows(m);
  std::iota(rows.begin(), rows.end(), Eigen::Index(0));
  std::mt19937_64 rng(system.seed);
  for (Eigen::Index i = 0; i < s; ++i) {
    std::uniform_int_distribution<Eigen::Index> pick(i, m - 1);
    std::swap(rows[i], rows[pick(rng)]);
  }
  rows.resize(s);
  std::sort(rows.begin(), rows.end());
  const double scale = std::sqrt(double(m) / double(s));
  Eigen::MatrixXd a(s, system.jacobian.cols());
  Eigen::VectorXd r(s);
  for (Eigen::Index i = 0; i < s; ++i) {
    a.row(i) = scale * system.jacobian.row(rows[i]);
    r[i] = scale * system.rhs[rows[i]];
  }
  return truncated_svd_solve(a, r, system.rcond);
}

Eigen::MatrixXd constraint_basis(const std::vector<Eigen::VectorXd>& gradients, int* skipped) {
  int dropped = 0;
  std::vector<const Eigen::VectorXd*> kept;
  for (const auto& g : gradients) {
    if (g.norm() <= 1e-30) {
      ++dropped;
    } else {
      kept.push_back(&g);
    }
  }
  if (skipped != nullptr) *skipped = dropped;
  if (kept.empty()) return Eigen::MatrixXd(gradients.empty() ? 0 : gradients[0].size(), 0);
  const Eigen::Index n = kept[0]->size();
  Eigen::MatrixXd g(n, Eigen::Index(kept.size()));
  for (std::size_t j = 0; j < kept.size(); ++j) g.col(Eigen::Index(j)) = *kept[j];
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(g);
  const Eigen::Index rank = qr.rank();
  return qr.householderQ() * Eigen::MatrixXd::Identity(n, rank);
}

Eigen::MatrixXd project_rows(const Eigen::Ref<const Eigen::MatrixXd>& jacobian,
                             const Eigen::Ref<const Eigen::MatrixXd>& basis) {
  if (basis.cols() == 0) return jacobian;
  Eigen::MatrixXd out = jacobian - (jacobian * basis) * basis.transpose();
  // A row lying in span(basis) leaves only rounding noise; flush it to an exact zero.
  constexpr double noise = 64.0 * std::numeric_limits<double>::epsilon();
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    if (out.row(i).norm() <= noise * jacobian.row(i).norm()) out.row(i).setZero();
  }
  return out;
}

namespace {

TengResult gauss_newton(const NetworkSpec& net, const FlatParams& theta,
                        const QuadratureGrid& grid, const Field& target,
                        const GradientProvider* gradients, const TengOptions& options) {
  check_params(net, theta);
  if (target.cols() != grid.n || target.rows() != net.output_dim) {
    throw Error(ErrorKind::length_mismatch, "target field does not match grid/network");
  }
  TengResult out;
  out.theta = theta;
  TengReport& report = out.report;

  double residual = weighted_norm(grid, target - forward(net, theta, grid.points));
  report.initial_residual = residual;
  report.final_residual = residual;
  report.residual_history.push_back(residual);
  if (residual <= options.tol_abs) {
    report.status = TengStatus::converged;
    return out;
  }

  JacobianEval eval;
  report.status = TengStatus::max_iterations;
  for (int it = 0; it < options.max_iterations; ++it) {
    if (it == 0 || !options.freeze_jacobian) {
      eval = parameter_jacobian(net, out.theta, grid.points);
    } else {
      eval.values = forward(net, out.theta, grid.points);
    }
    LeastSquaresSystem system = weighted_system(grid, eval, target - eval.values);
    system.solver = options.solver;
    system.rcond = options.rcond;
    system.seed = options.seed + std::uint64_t(it);

    Eigen::MatrixXd basis;
    if (gradients != nullptr) {
      basis = constraint_basis((*gradients)(out.theta));
      system.jacobian = project_rows(system.jacobian, basis);
    }
    LsSolution sol = solve_ls(system);
    if (basis.cols() > 0) sol.delta -= basis * (basis.transpose() * sol.delta);
    report.jacobian_rank = sol.rank;
    report.truncated_singular_values = sol.truncated;

    double step = 1.0;
    bool accepted = false;
    FlatParams trial;
    double trial_residual = residual;
    for (int h = 0; h <= options.max_halvings; ++h) {
      trial = out.theta + step * sol.delta;
      trial_residual = weighted_norm(grid, target - forward(net, trial, grid.points));
      if (trial_residual < residual) {
        accepted = true;
        break;
      }
      step *= 0.5;
      ++report.halvings;
    }
    if (!accepted) {
      report.status = it == 0 ? TengStatus::no_progress : TengStatus::stalled;
      break;
    }
    const double ratio = trial_residual / residual;
    out.theta = std::move(trial);
    residual = trial_residual;
    ++report.sub_iterations;
    report.residual_history.push_back(residual);
    report.final_residual = residual;
    if (residual <= options.tol_abs || residual <= options.tol_rel * report.initial_residual) {
      report.status = TengStatus::converged;
      break;
    }
    if (ratio > options.stall_ratio) {
      report.status = TengStatus::stalled;
      break;
    }
  }
  return out;
}

}  // namespace

TengResult teng_update(const NetworkSpec& net, const FlatParams& theta, const QuadratureGrid& grid,
                       const Field& target, const TengOptions& options) {
  return gauss_newton(net, theta, grid, target, nullptr, options);
}

TengResult tangent_projected_update(const NetworkSpec& net, const FlatParams& theta,
                                    const QuadratureGrid& grid, const Field& target,
                                    const GradientProvider& gradients,
                                    const TengOptions& options) {
  return gauss_newton(net, theta, grid, target, &gradients, options);
}

Eigen::VectorXd galerkin_rhs(const NetworkSpec& net, const FlatParams& theta,
                             const QuadratureGrid& grid, const ProblemSpec& problem,
                             double regularization, double rcond) {
  if (regularization < 0.0) throw Error(ErrorKind::invalid_argument, "regularization must be >= 0");
  const JacobianEval eval = parameter_jacobian(net, theta, grid.points);
  const Field f = evaluate_rhs(problem, jets_on_points(net, theta, grid.points, problem.rhs_order));
  const LeastSquaresSystem system = weighted_system(grid, eval, f);
  Eigen::MatrixXd mass = system.jacobian.transpose() * system.jacobian;
  mass.diagonal().array() += regularization;
  const Eigen::VectorXd force = system.jacobian.transpose() * system.rhs;
  return truncated_svd_solve(mass, force, rcond).delta;
}

}  // namespace rpteng
