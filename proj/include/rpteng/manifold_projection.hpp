#pragma once

#include <vector>

#include <Eigen/Core>

#include "rpteng/invariants.hpp"
#include "rpteng/network.hpp"
#include "rpteng/quadrature.hpp"

namespace rpteng {

enum class ProjectionStatus { converged, max_iterations, singular_gram };

std::string_view to_string(ProjectionStatus status);

struct ProjectionReport {
  Eigen::VectorXd lambda;
  int iterations = 0;
  Eigen::VectorXd constraint_residual;
  double parameter_displacement = 0.0;
  double gram_condition = 0.0;
  ProjectionStatus status = ProjectionStatus::converged;
};

struct ProjectionOptions {
  /// Per-constraint tolerance is relative_tolerance * max(1, |anchor_j|).
  double relative_tolerance = 1e-12;
  int max_iterations = 50;
  double max_gram_condition = 1e12;
};

struct ProjectionResult {
  FlatParams theta;
  ProjectionReport report;
};

/// I_j(u_theta) on the grid for every invariant.
Eigen::VectorXd invariant_values(const NetworkSpec& net, const FlatParams& theta,
                                 const QuadratureGrid& grid,
                                 const std::vector<InvariantSpec>& invariants);

/// I_j(u_theta) - anchor_j.
Eigen::VectorXd constraint_values(const NetworkSpec& net, const FlatParams& theta,
                                  const QuadratureGrid& grid,
                                  const std::vector<InvariantSpec>& invariants,
                                  const Eigen::VectorXd& anchors);

/// Closest-point projection of theta onto {I_j(u) = anchor_j} by simplified Newton on the
/// multipliers: the constraint Jacobian G is frozen at theta_in and
///   lambda <- lambda - (G G^T)^{-1} m(theta_in + G^T lambda),   lambda_0 = 0.
/// On max_iterations the best iterate is returned; on singular_gram theta_in is returned.
ProjectionResult project(const NetworkSpec& net, const FlatParams& theta,
                         const QuadratureGrid& grid, const std::vector<InvariantSpec>& invariants,
                         const Eigen::VectorXd& anchors, const ProjectionOptions& options = {});

}  // namespace rpteng
