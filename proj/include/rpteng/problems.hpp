#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "rpteng/field.hpp"
#include "rpteng/invariants.hpp"
#include "rpteng/jet.hpp"

namespace rpteng {

enum class ProblemKind { burgers, kdv, wave };
enum class ReferenceKind { analytic, spectral };

struct ProblemSpec {
  ProblemKind kind = ProblemKind::burgers;
  std::string name = "burgers";
  double a = -1.0;
  double b = 1.0;
  int components = 1;
  /// Highest x-derivative the right-hand side reads.
  int rhs_order = 1;
  std::vector<InvariantSpec> invariants;
  ReferenceKind reference = ReferenceKind::spectral;

  double burgers_width = 3.0;      // B in 1 + 0.3 exp(-B^2 x^2)
  double soliton_amplitude = 2.0;  // A
  double soliton_offset = 20.0;    // mu

  double length() const { return b - a; }
};

struct ProblemOptions {
  double burgers_width = 3.0;
  double soliton_amplitude = 2.0;
  double soliton_offset = 20.0;
};

ProblemSpec make_problem(ProblemKind kind, const ProblemOptions& options = {});
ProblemSpec make_problem(std::string_view name, const ProblemOptions& options = {});
std::string_view to_string(ProblemKind kind);

// Pointwise right-hand sides u_t = f(u, u_x, ...).
double rhs_burgers(const Jet3<double>& u);
double rhs_kdv(const Jet3<double>& u);
std::pair<double, double> rhs_wave(const Jet3<double>& rho, const Jet3<double>& v);

/// Applies the problem's right-hand side to every point of a jet field.
Field evaluate_rhs(const ProblemSpec& problem, const FieldJets& jets);

Eigen::VectorXd initial_condition(const ProblemSpec& problem, double x);
Field initial_field(const ProblemSpec& problem, const Eigen::Ref<const Eigen::VectorXd>& xs);

/// A sech^2((sqrt(3A)/6)(x - ct - mu)), c = A/3.
double analytic_kdv(double x, double t, double amplitude, double offset);

/// Fourier-collocation semi-discretisation on n equispaced points of the problem domain.
/// Burgers uses the conservative form with 2/3-rule dealiasing of u^2.
Field spectral_rhs(const ProblemSpec& problem, const Field& u);

/// Snapshots of a grid solution; snapshot i is valid at times[i].
struct ReferenceSolution {
  double a = 0.0;
  double length = 1.0;
  Eigen::VectorXd x;
  std::vector<double> times;
  std::vector<Field> snapshots;

  std::size_t nearest(double t) const;
  /// Trigonometric interpolation of snapshot i onto arbitrary points.
  Field at_points(std::size_t i, const Eigen::Ref<const Eigen::VectorXd>& xs) const;
};

/// Spectral reference advanced by fixed-step Dormand-Prince 5(4), keeping every
/// `snapshot_every`-th step. Throws Error(reference_diverged) if |u| exceeds 1e6.
ReferenceSolution spectral_reference(const ProblemSpec& problem, int n_grid, double dt,
                                     double t_end, int snapshot_every = 1);

/// Analytic reference for problems that have one (KdV soliton).
Field analytic_reference(const ProblemSpec& problem, double t,
                         const Eigen::Ref<const Eigen::VectorXd>& xs);

}  // namespace rpteng
