#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "rpteng/field.hpp"
#include "rpteng/integrators.hpp"
#include "rpteng/manifold_projection.hpp"
#include "rpteng/network.hpp"
#include "rpteng/problems.hpp"
#include "rpteng/quadrature.hpp"
#include "rpteng/teng.hpp"

namespace rpteng {

/// What a run does when a projection or TENG step fails: `strict` throws, `warn` keeps the
/// unprojected (or unchanged) parameters and records the status.
enum class FailurePolicy { strict, warn };

struct RunConfig {
  std::string problem = "burgers";
  ProblemOptions problem_options;
  NetworkSpec network;

  int n_sample = 1000;
  /// 0 means "use the sample grid".
  int n_invariant = 0;
  int n_test = 1000;

  double dt = 5e-3;
  double t_end = 0.5;
  std::string tableau = "euler";
  bool relaxation = false;
  bool tangent_projection = false;
  bool manifold_projection = true;
  /// Invariants enforced by the projections; empty selects the problem default.
  std::vector<std::string> projected_invariants;

  TengOptions teng;
  RelaxationOptions relax;
  ProjectionOptions projection;
  FailurePolicy policy = FailurePolicy::strict;

  std::uint64_t seed = 0;
  double fit_tolerance = 1e-6;
  int fit_max_iterations = 2000;
  std::optional<FlatParams> initial_params;

  bool compute_error = true;
  int reference_points = 256;
  double reference_dt = 1e-3;

  std::filesystem::path output;
  std::filesystem::path snapshot_output;
  /// Write a field snapshot every k steps (0 = never).
  int snapshot_every = 0;
};

/// Problem-specific defaults: architecture, grids, tableau and structure-preserving toggles.
RunConfig default_config(std::string_view problem);

/// Sets one option from a `key = value` pair; keys are the CLI long flag names.
void apply_config_entry(RunConfig& config, const std::string& key, const std::string& value);

/// Reads flat `key = value` lines; blank lines and `#` comments are ignored.
std::vector<std::pair<std::string, std::string>> read_config_file(const std::filesystem::path& path);

/// Throws Error(invalid_config) on inconsistent settings.
void validate(const RunConfig& config);

struct FitReport {
  double relative_error = 0.0;
  int iterations = 0;
  int seeds_tried = 0;
  std::uint64_t seed_used = 0;
  bool reached_tolerance = false;
};

struct FitResult {
  FlatParams theta;
  FitReport report;
};

/// Gauss-Newton fit of the network to sampled values starting from theta.
FitResult fit_params(const NetworkSpec& net, const FlatParams& theta, const QuadratureGrid& grid,
                     const Field& target, double tolerance, int max_iterations,
                     double rcond = 0.0);

/// Fits the initial condition from init_params(seed), retrying up to five further seeds when a
/// fit stagnates above tolerance. Throws Error(fit_failed) if no seed gets below 100 * tolerance.
FitResult fit_initial(const NetworkSpec& net, const ProblemSpec& problem,
                      const QuadratureGrid& grid, std::uint64_t seed, double tolerance = 1e-6,
                      int max_iterations = 2000);

struct InvariantSample {
  std::string name;
  double value = 0.0;
  double drift_init = 0.0;     // value - I(u_theta0)
  double drift_prev = 0.0;     // value - I(u_theta_{n-1})
  double target_defect = 0.0;  // I(u_target) - I(u_theta_{n-1}) on the sample grid
};

struct StepReport {
  long step = 0;
  double t = 0.0;
  double gamma = 1.0;
  std::optional<RelaxationResult> relaxation;
  TengReport teng;
  std::optional<ProjectionReport> projection;
  std::vector<InvariantSample> invariants;
  std::optional<double> relative_error;
  /// |t - t_reference| for the reference sample used in relative_error.
  double reference_gap = 0.0;
};

struct RunResult {
  FlatParams theta0;
  FitReport fit;
  Eigen::VectorXd anchors;  // tracked invariants at theta0, on the invariant grid
  std::vector<StepReport> steps;
  std::vector<std::pair<double, FlatParams>> snapshots;
  FlatParams theta_final;
  double t_final = 0.0;
};

/// Runs the relaxation / TENG / projection loop until t >= t_end. Steps stream to the CSV at
/// config.output as they complete.
RunResult run(const RunConfig& config);

/// sum_i |u(x_i) - u_ref(x_i)| / sum_i |u_ref(x_i)| with Euclidean norms over components.
double relative_error(const Field& approx, const Field& reference);

struct Snapshot {
  double t = 0.0;
  Eigen::VectorXd x;
  Field values;
};

using SnapshotSeries = std::vector<Snapshot>;

struct ComparisonRow {
  double t_run = 0.0;
  double t_reference = 0.0;
  double gap = 0.0;
  double relative_error = 0.0;
};

/// Matches every run snapshot with the nearest reference time and reports relative errors.
/// Reference values are interpolated trigonometrically when the point sets differ.
/// Throws Error(misaligned_times) if a nearest gap exceeds dt.
std::vector<ComparisonRow> compare(const SnapshotSeries& run, const SnapshotSeries& reference,
                                   double a, double length, double dt);

SnapshotSeries to_series(const ReferenceSolution& reference);

void write_step_csv_header(std::ostream& out, const std::vector<InvariantSpec>& invariants);
void write_step_csv_row(std::ostream& out, const StepReport& step);
void write_snapshot_csv(const std::filesystem::path& path, const SnapshotSeries& series);
void write_reference_csv(const std::filesystem::path& path, const ReferenceSolution& reference);
void write_comparison_csv(const std::filesystem::path& path, const std::vector<ComparisonRow>& rows);
/// Reads either the long (t,x,component,value) or the wide (t,x,u0,...) snapshot layout.
SnapshotSeries read_snapshots(const std::filesystem::path& path);

struct ConservationSummary {
  std::string name;
  double max_abs_drift_init = 0.0;
  double max_abs_drift_prev = 0.0;
};

/// Max |drift| per invariant column of a step CSV.
std::vector<ConservationSummary> summarize_steps(const std::filesystem::path& step_csv);

}  // namespace rpteng
