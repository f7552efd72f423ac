#pragma once

#include <Eigen/Core>

namespace rpteng {

/// Equispaced points on the periodic interval [a, b) with uniform weights (b - a) / n.
struct QuadratureGrid {
  double a = 0.0;
  double b = 1.0;
  int n = 0;
  Eigen::VectorXd points;
  Eigen::VectorXd weights;

  double length() const { return b - a; }
  double spacing() const { return (b - a) / n; }
};

/// Throws Error(invalid_domain) if b <= a or n < 2.
QuadratureGrid make_grid(double a, double b, int n);

/// Same spacing as make_grid(a, b, n), shifted by half a cell. Used for out-of-sample test points.
QuadratureGrid make_staggered_grid(double a, double b, int n);

/// Sum of weights_i * values_i.
double integrate(const QuadratureGrid& grid, const Eigen::Ref<const Eigen::VectorXd>& values);

/// Quadrature-weighted inner product of two per-point sample vectors.
double weighted_dot(const QuadratureGrid& grid, const Eigen::Ref<const Eigen::VectorXd>& u,
                    const Eigen::Ref<const Eigen::VectorXd>& v);

}  // namespace rpteng
