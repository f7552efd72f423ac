#include "rpteng/invariants.hpp"

#include "rpteng/error.hpp"

namespace rpteng {

InvariantSpec mass_invariant() { return {InvariantKind::mass, "mass"}; }
InvariantSpec energy_invariant() { return {InvariantKind::quadratic, "energy"}; }
InvariantSpec hamiltonian_invariant() { return {InvariantKind::hamiltonian, "hamiltonian"}; }

InvariantSpec parse_invariant(std::string_view name) {
  if (name == "mass") return mass_invariant();
  if (name == "energy") return energy_invariant();
  if (name == "hamiltonian") return hamiltonian_invariant();
  throw Error(ErrorKind::invalid_argument, "unknown invariant '" + std::string(name) + "'");
}

Eigen::VectorXd density(const InvariantSpec& inv, const Field& field) {
  switch (inv.kind) {
    case InvariantKind::mass: return field.colwise().sum().transpose();
    case InvariantKind::quadratic: return field.colwise().squaredNorm().transpose();
    case InvariantKind::hamiltonian: return 0.5 * field.colwise().squaredNorm().transpose();
  }
  return {};
}

Field density_gradient(const InvariantSpec& inv, const Field& field) {
  switch (inv.kind) {
    case InvariantKind::mass: return Field::Ones(field.rows(), field.cols());
    case InvariantKind::quadratic: return 2.0 * field;
    case InvariantKind::hamiltonian: return field;
  }
  return {};
}

double eval_invariant(const InvariantSpec& inv, const QuadratureGrid& grid, const Field& field) {
  if (field.cols() != grid.n) {
    throw Error(ErrorKind::length_mismatch, "eval_invariant: field has " +
                                                std::to_string(field.cols()) + " points, grid " +
                                                std::to_string(grid.n));
  }
  return integrate(grid, density(inv, field));
}

Eigen::VectorXd invariant_theta_gradient(const InvariantSpec& inv, const QuadratureGrid& grid,
                                         const JacobianEval& eval) {
  if (eval.values.cols() != grid.n) {
    throw Error(ErrorKind::length_mismatch, "invariant_theta_gradient: Jacobian/grid mismatch");
  }
  Field weighted = density_gradient(inv, eval.values);
  weighted.array().rowwise() *= grid.weights.transpose().array();
  return eval.jacobian.transpose() * weighted.reshaped();
}

Eigen::VectorXd invariant_theta_gradient(const InvariantSpec& inv, const NetworkSpec& net,
                                         const FlatParams& theta, const QuadratureGrid& grid) {
  return invariant_theta_gradient(inv, grid, parameter_jacobian(net, theta, grid.points));
}

double tangent_conservation_defect(const InvariantSpec& inv, const NetworkSpec& net,
                                   const FlatParams& theta, const Eigen::VectorXd& theta_dot,
                                   const QuadratureGrid& grid) {
  if (theta_dot.size() != theta.size()) {
    throw Error(ErrorKind::length_mismatch, "theta_dot must match the parameter count");
  }
  const JacobianEval eval = parameter_jacobian(net, theta, grid.points);
  const Eigen::VectorXd du = eval.jacobian * theta_dot;
  Field weighted = density_gradient(inv, eval.values);
  weighted.array().rowwise() *= grid.weights.transpose().array();
  return weighted.reshaped().dot(du);
}

}  // namespace rpteng
