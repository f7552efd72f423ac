#include "rpteng/quadrature.hpp"

#include <string>

#include "rpteng/error.hpp"

namespace rpteng {

namespace {

void check_domain(double a, double b, int n) {
  if (!(b > a) || n < 2) {
    throw Error(ErrorKind::invalid_domain, "need b > a and n >= 2 (a=" + std::to_string(a) +
                                               ", b=" + std::to_string(b) +
                                               ", n=" + std::to_string(n) + ")");
  }
}

QuadratureGrid build(double a, double b, int n, double offset) {
  check_domain(a, b, n);
  QuadratureGrid grid;
  grid.a = a;
  grid.b = b;
  grid.n = n;
  grid.points.resize(n);
  const double h = (b - a) / n;
  for (int i = 0; i < n; ++i) grid.points[i] = a + (i + offset) * h;
  grid.weights = Eigen::VectorXd::Constant(n, h);
  return grid;
}

}  // namespace

QuadratureGrid make_grid(double a, double b, int n) { return build(a, b, n, 0.0); }

QuadratureGrid make_staggered_grid(double a, double b, int n) { return build(a, b, n, 0.5); }

double integrate(const QuadratureGrid& grid, const Eigen::Ref<const Eigen::VectorXd>& values) {
  if (values.size() != grid.n) {
    throw Error(ErrorKind::length_mismatch, "integrate: " + std::to_string(values.size()) +
                                                " values for a grid of " + std::to_string(grid.n));
  }
  return grid.weights.dot(values);
}

double weighted_dot(const QuadratureGrid& grid, const Eigen::Ref<const Eigen::VectorXd>& u,
                    const Eigen::Ref<const Eigen::VectorXd>& v) {
  if (u.size() != grid.n || v.size() != grid.n) {
    throw Error(ErrorKind::length_mismatch, "weighted_dot: sample vectors do not match the grid");
  }
  return grid.weights.dot(u.cwiseProduct(v));
}

}  // namespace rpteng
