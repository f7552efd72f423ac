#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Core>

#include "rpteng/field.hpp"
#include "rpteng/network.hpp"
#include "rpteng/problems.hpp"
#include "rpteng/quadrature.hpp"

namespace rpteng {

enum class LsSolver { truncated_svd, sketched };

/// Weighted least-squares system: rows are sqrt(w_i) grad_theta u_c(x_i), point-major then
/// component, and r holds sqrt(w_i) du_c(x_i).
struct LeastSquaresSystem {
  Eigen::MatrixXd jacobian;
  Eigen::VectorXd rhs;
  LsSolver solver = LsSolver::truncated_svd;
  double rcond = 1e-6;
  std::uint64_t seed = 0;
};

struct LsSolution {
  Eigen::VectorXd delta;
  int rank = 0;
  int truncated = 0;
  double sigma_max = 0.0;
};

LeastSquaresSystem assemble_system(const NetworkSpec& net, const FlatParams& theta,
                                   const QuadratureGrid& grid, const Field& du);

/// Minimal-norm solution of min ||J x - r|| discarding singular values below rcond * sigma_max.
/// Sketched mode first keeps a seeded uniform sample of min(rows, 4 cols) rows.
LsSolution solve_ls(const LeastSquaresSystem& system);

/// Truncated pseudoinverse solve of an explicit matrix; shared by every solver path.
LsSolution truncated_svd_solve(const Eigen::Ref<const Eigen::MatrixXd>& a,
                               const Eigen::Ref<const Eigen::VectorXd>& r, double rcond);

enum class TengStatus { converged, max_iterations, stalled, no_progress };

struct TengReport {
  int sub_iterations = 0;
  double initial_residual = 0.0;
  double final_residual = 0.0;
  int jacobian_rank = 0;
  int truncated_singular_values = 0;
  int halvings = 0;
  TengStatus status = TengStatus::converged;
  std::vector<double> residual_history;
};

struct TengOptions {
  int max_iterations = 5;
  double tol_abs = 1e-10;
  double tol_rel = 1e-8;
  int max_halvings = 4;
  /// Stop once an accepted sub-iteration shrinks the residual by less than this factor.
  /// 1.0 disables the check.
  double stall_ratio = 1.0;
  LsSolver solver = LsSolver::truncated_svd;
  double rcond = 1e-6;
  std::uint64_t seed = 0;
  /// Reuse the first Jacobian for every sub-iteration (profiling aid).
  bool freeze_jacobian = false;
};

/// Quadrature-weighted L2 norm of a field on the grid.
double weighted_norm(const QuadratureGrid& grid, const Field& field);

struct TengResult {
  FlatParams theta;
  TengReport report;
};

/// Gauss-Newton sub-iterations toward `target`, re-linearising at every accepted iterate.
/// A sub-step that would raise the residual is halved up to max_halvings times; if the first
/// one still fails the parameters are returned unchanged with status no_progress.
TengResult teng_update(const NetworkSpec& net, const FlatParams& theta, const QuadratureGrid& grid,
                       const Field& target, const TengOptions& options = {});

/// Supplies invariant gradients at a given parameter vector.
using GradientProvider = std::function<std::vector<Eigen::VectorXd>(const FlatParams&)>;

/// Orthonormal basis of span(gradients); gradients with norm <= 1e-30 are skipped.
Eigen::MatrixXd constraint_basis(const std::vector<Eigen::VectorXd>& gradients,
                                 int* skipped = nullptr);

/// J (I - Q Q^T); rows reduced to rounding noise come back as exact zeros.
Eigen::MatrixXd project_rows(const Eigen::Ref<const Eigen::MatrixXd>& jacobian,
                             const Eigen::Ref<const Eigen::MatrixXd>& basis);

/// teng_update with every step restricted to the orthogonal complement of the invariant
/// gradients, recomputed at each sub-iterate.
TengResult tangent_projected_update(const NetworkSpec& net, const FlatParams& theta,
                                    const QuadratureGrid& grid, const Field& target,
                                    const GradientProvider& gradients,
                                    const TengOptions& options = {});

/// Neural Galerkin baseline: (M + eps I)^+ F with M = J^T W J and F = J^T W f(u).
Eigen::VectorXd galerkin_rhs(const NetworkSpec& net, const FlatParams& theta,
                             const QuadratureGrid& grid, const ProblemSpec& problem,
                             double regularization, double rcond = 1e-12);

}  // namespace rpteng
