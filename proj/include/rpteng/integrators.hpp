#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include <Eigen/Core>

#include "rpteng/field.hpp"
#include "rpteng/invariants.hpp"
#include "rpteng/network.hpp"
#include "rpteng/problems.hpp"
#include "rpteng/quadrature.hpp"

namespace rpteng {

struct ButcherTableau {
  std::string name;
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
  Eigen::VectorXd c;
  int order = 1;

  int stages() const { return int(b.size()); }
  /// True when a is strictly lower triangular.
  bool is_explicit() const;
};

ButcherTableau explicit_euler();
ButcherTableau classical_rk4();
/// One-stage Gauss method. Only used to exercise the quadratic-invariant condition.
ButcherTableau implicit_midpoint();
/// Dormand-Prince 5(4), propagating the fifth-order weights.
ButcherTableau dormand_prince();
ButcherTableau tableau_by_name(std::string_view name);

using RhsFunction = std::function<Field(const Field&)>;

/// d = sum_i b_i f(y_i) with y_i = u + dt sum_j a_ij f(y_j). Explicit tableaux only.
/// When `first_stage` is given it is used as f(u) for the first stage (c_1 = 0).
Field rk_increment(const ButcherTableau& tableau, const RhsFunction& rhs, const Field& u,
                   double dt, const Field* first_stage = nullptr);

struct QuadraticCondition {
  bool holds = false;
  double max_violation = 0.0;
};

/// max_{ij} |b_i a_ij + b_j a_ji - b_i b_j| <= 1e-14.
QuadraticCondition check_quadratic_condition(const ButcherTableau& tableau);

enum class RelaxationStatus { converged, degenerate_direction, residual_above_tolerance };

struct RelaxationResult {
  double gamma = 1.0;
  int iterations = 0;
  int bisection_iterations = 0;
  double residual = 0.0;
  RelaxationStatus status = RelaxationStatus::converged;
};

enum class RelaxationMethod { closed_form, newton };

struct RelaxationOptions {
  /// closed_form applies to quadratic invariants; newton works for any smooth density.
  RelaxationMethod method = RelaxationMethod::closed_form;
  double max_deviation = 0.1;
  double relative_tolerance = 1e-13;
  int newton_max_iterations = 30;
  int bisection_max_iterations = 60;
};

/// Solves I(u + gamma dt d) = I(u) for the root near 1.
///
/// Linear invariants are rejected with Error(linear_invariant): I(u + gamma dt d) - I(u) is
/// linear in gamma and has no root near 1 unless I(d) = 0. A direction with <d,d> <= 1e-30
/// returns gamma = 1 with status degenerate_direction. |gamma - 1| > max_deviation throws
/// Error(relaxation_out_of_range).
RelaxationResult relax_solve(const InvariantSpec& inv, const QuadratureGrid& grid, const Field& u,
                             const Field& d, double dt, const RelaxationOptions& options = {});

struct RelaxedTarget {
  Field current;    // network field on the sample grid
  Field increment;  // d^n
  Field target;     // current + gamma dt d^n
  double gamma = 1.0;
  std::optional<RelaxationResult> relaxation;
};

/// Builds the time-stepping target on the sample grid.
///
/// The first stage uses exact network jets; later stages are sampled fields and are
/// differentiated spectrally on the (periodic, equispaced) sample grid. With
/// `relax == nullptr` gamma stays 1.
RelaxedTarget build_relaxed_target(const NetworkSpec& net, const FlatParams& theta,
                                   const QuadratureGrid& grid, const ProblemSpec& problem,
                                   const ButcherTableau& tableau, double dt,
                                   const InvariantSpec* relax,
                                   const RelaxationOptions& options = {});

}  // namespace rpteng
