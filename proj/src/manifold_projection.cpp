#include "rpteng/manifold_projection.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "rpteng/ad_engine.hpp"
#include "rpteng/error.hpp"

namespace rpteng {

std::string_view to_string(ProjectionStatus status) {
  switch (status) {
    case ProjectionStatus::converged: return "converged";
    case ProjectionStatus::max_iterations: return "max-iters";
    case ProjectionStatus::singular_gram: return "singular-gram";
  }
  return "unknown";
}

Eigen::VectorXd invariant_values(const NetworkSpec& net, const FlatParams& theta,
                                 const QuadratureGrid& grid,
                                 const std::vector<InvariantSpec>& invariants) {
  const Field u = forward(net, theta, grid.points);
  Eigen::VectorXd values(Eigen::Index(invariants.size()));
  for (std::size_t j = 0; j < invariants.size(); ++j) {
    values[Eigen::Index(j)] = eval_invariant(invariants[j], grid, u);
  }
  return values;
}

Eigen::VectorXd constraint_values(const NetworkSpec& net, const FlatParams& theta,
                                  const QuadratureGrid& grid,
                                  const std::vector<InvariantSpec>& invariants,
                                  const Eigen::VectorXd& anchors) {
  if (anchors.size() != Eigen::Index(invariants.size())) {
    throw Error(ErrorKind::length_mismatch, "one anchor per invariant is required");
  }
  return invariant_values(net, theta, grid, invariants) - anchors;
}

ProjectionResult project(const NetworkSpec& net, const FlatParams& theta,
                         const QuadratureGrid& grid, const std::vector<InvariantSpec>& invariants,
                         const Eigen::VectorXd& anchors, const ProjectionOptions& options) {
  if (invariants.empty()) throw Error(ErrorKind::invalid_argument, "project: no invariants");
  if (!(options.relative_tolerance > 0.0)) {
    throw Error(ErrorKind::invalid_argument, "project: tolerance must be positive");
  }
  check_params(net, theta);
  const Eigen::Index ni = Eigen::Index(invariants.size());
  if (anchors.size() != ni) throw Error(ErrorKind::length_mismatch, "one anchor per invariant");

  const Eigen::VectorXd tol =
      options.relative_tolerance * anchors.cwiseAbs().cwiseMax(1.0);

  const JacobianEval eval = parameter_jacobian(net, theta, grid.points);
  Eigen::MatrixXd g(ni, theta.size());
  for (Eigen::Index j = 0; j < ni; ++j) {
    g.row(j) = invariant_theta_gradient(invariants[std::size_t(j)], grid, eval).transpose();
  }
  const Eigen::MatrixXd gram = g * g.transpose();

  ProjectionResult out;
  out.theta = theta;
  ProjectionReport& report = out.report;
  report.lambda = Eigen::VectorXd::Zero(ni);

  const Eigen::VectorXd eig = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(
                                  gram, Eigen::EigenvaluesOnly)
                                  .eigenvalues();
  report.gram_condition = eig.minCoeff() > 0.0 ? eig.maxCoeff() / eig.minCoeff()
                                               : std::numeric_limits<double>::infinity();
  if (!(report.gram_condition <= options.max_gram_condition)) {
    report.status = ProjectionStatus::singular_gram;
    report.constraint_residual = constraint_values(net, theta, grid, invariants, anchors);
    return out;
  }
  const Eigen::LDLT<Eigen::MatrixXd> gram_solver(gram);

  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(ni);
  double best_score = std::numeric_limits<double>::infinity();
  report.status = ProjectionStatus::max_iterations;
  for (int it = 1; it <= options.max_iterations; ++it) {
    const FlatParams eta = theta + g.transpose() * lambda;
    const Eigen::VectorXd m = constraint_values(net, eta, grid, invariants, anchors);
    report.iterations = it;
    const double score = (m.cwiseAbs().array() / tol.array()).maxCoeff();
    if (score < best_score) {
      best_score = score;
      out.theta = eta;
      report.lambda = lambda;
      report.constraint_residual = m;
    }
    if (score <= 1.0) {
      report.status = ProjectionStatus::converged;
      break;
    }
    lambda -= gram_solver.solve(m);
  }
  report.parameter_displacement = (out.theta - theta).norm();
  return out;
}

}  // namespace rpteng
