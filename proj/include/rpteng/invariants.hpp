#pragma once

#include <string>
#include <string_view>

#include <Eigen/Core>

#include "rpteng/ad_engine.hpp"
#include "rpteng/field.hpp"
#include "rpteng/network.hpp"
#include "rpteng/quadrature.hpp"

namespace rpteng {

enum class InvariantKind { mass, quadratic, hamiltonian };

/// I(u) = integral of k(u) over the grid, with k applied to the component tuple at each point:
///   mass        k(u) = sum_c u_c
///   quadratic   k(u) = sum_c u_c^2
///   hamiltonian k(u) = 1/2 sum_c u_c^2
struct InvariantSpec {
  InvariantKind kind = InvariantKind::mass;
  std::string name = "mass";

  int degree() const { return kind == InvariantKind::mass ? 1 : 2; }
};

InvariantSpec mass_invariant();
InvariantSpec energy_invariant();
InvariantSpec hamiltonian_invariant();

/// Pointwise k(u) for every column of the field.
Eigen::VectorXd density(const InvariantSpec& inv, const Field& field);

/// Pointwise dk/du_c, same shape as the field.
Field density_gradient(const InvariantSpec& inv, const Field& field);

double eval_invariant(const InvariantSpec& inv, const QuadratureGrid& grid, const Field& field);

/// Sum_i w_i k'(u(x_i)) . grad_theta u(x_i), from a Jacobian already evaluated on the grid.
Eigen::VectorXd invariant_theta_gradient(const InvariantSpec& inv, const QuadratureGrid& grid,
                                         const JacobianEval& eval);

Eigen::VectorXd invariant_theta_gradient(const InvariantSpec& inv, const NetworkSpec& net,
                                         const FlatParams& theta, const QuadratureGrid& grid);

/// dI/dt = I'(u) . (grad_theta u . theta_dot); nonzero values measure tangent-space leakage.
double tangent_conservation_defect(const InvariantSpec& inv, const NetworkSpec& net,
                                   const FlatParams& theta, const Eigen::VectorXd& theta_dot,
                                   const QuadratureGrid& grid);

InvariantSpec parse_invariant(std::string_view name);

}  // namespace rpteng
