#pragma once

// Experiment sweeps. A sweep is a list of independent (grid point, trial)
// jobs whose seeds depend only on the base seed, so output does not depend on
// the number of worker threads.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "robustl1/config.hpp"
#include "robustl1/problems.hpp"
#include "robustl1/solvers.hpp"

namespace robustl1 {

enum class Experiment {
  kBreakdown1d,
  kSampleComplexity,
  kDenseNoiseScaling,
  kPThresholdCurve,
  kLowerBoundDense,
};

std::string_view experiment_name(Experiment e);
Experiment parse_experiment(std::string_view name);

enum class LambdaPolicy { kExact, kMultiple };

/// Method names accepted by sweeps and `solve`.
const std::vector<std::string>& known_methods();

struct SweepSpec {
  Experiment experiment = Experiment::kBreakdown1d;
  std::vector<std::string> methods{"l1"};
  /// η for breakdown_1d, m for sample_complexity, ‖d‖₁ for
  /// dense_noise_scaling, p for p_threshold_curve, ε for lower_bound_dense.
  std::vector<double> grid;
  std::size_t m = 1000;
  std::size_t n = 1;
  std::size_t k = 1;
  double amplitude = 100.0;
  LambdaPolicy lambda_policy = LambdaPolicy::kExact;
  double lambda_multiple = 1.0;
  std::size_t trials_per_point = 5;
  std::uint64_t base_seed = 0;
  /// Corruption fraction when η is not the grid variable.
  double eta = 0.15;
  double epsilon = 0.1;
  /// Exponent used by the lp method outside p_threshold_curve.
  double p = 0.5;
  CorruptionKind corruption = CorruptionKind::kTopkZeroing;
  double magnitude = 100.0;  // random_sign corruption only
  /// p_threshold_curve: also measure an IRLS breakdown on `inner_grid`.
  bool empirical = false;
  std::vector<double> inner_grid;
  std::size_t threads = 1;
  SolverOptions solver;

  /// Throws std::invalid_argument (unknown method, bad grid, bad sizes).
  void validate() const;

  static SweepSpec from_config(const KeyValueConfig& cfg);
};

struct SweepRow {
  std::string method;
  double grid_value = 0.0;
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  double relative_l2_error = 0.0;
  double objective = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  double estimate_norm = 0.0;
  /// Experiment-specific: m‖ŵ - w*‖/‖d‖₁ for lower_bound_dense, the
  /// breakdown threshold for p_threshold_curve, else the relative error.
  double value = 0.0;
};

struct SweepResult {
  Experiment experiment = Experiment::kBreakdown1d;
  std::vector<SweepRow> rows;  // ordered by (method as listed, grid index, trial)
};

/// Seed of job (grid index, trial). dense_noise_scaling ignores the grid
/// index so that the design and corruption stay fixed along the sweep.
std::uint64_t job_seed(const SweepSpec& spec, std::size_t grid_index, std::size_t trial);

/// Rebuilds the instance of a sweep row from its grid value and seed.
Problem make_instance(const SweepSpec& spec, double grid_value, std::uint64_t seed);

/// Solves `problem` with a named method; lambda and p follow `spec`.
SolverResult solve_with_method(const SweepSpec& spec, const std::string& method,
                               const Problem& problem, double p);

SweepResult run_breakdown_sweep(const SweepSpec& spec);
SweepResult run_sample_complexity_sweep(const SweepSpec& spec);
SweepResult run_dense_noise_scaling(const SweepSpec& spec);
SweepResult run_lower_bound_dense(const SweepSpec& spec);
SweepResult run_p_threshold_curve(const SweepSpec& spec);
/// Dispatches on spec.experiment.
SweepResult run_sweep(const SweepSpec& spec);

double median(std::vector<double> values);

struct GridSummary {
  std::string method;
  double grid_value = 0.0;
  double median_error = 0.0;
  double success_fraction = 0.0;  // trials with error ≤ kExactRecoveryThreshold
  double median_value = 0.0;
};

std::vector<GridSummary> summarize(const SweepResult& result);

/// Smallest grid value whose median relative error exceeds `threshold`.
std::optional<double> estimate_breakdown(const SweepResult& result, const std::string& method,
                                         double threshold = kExactRecoveryThreshold);

/// Doubles m from `m_start` until the constrained L1 estimate of a sparse
/// instance recovers w* (relative error ≤ kExactRecoveryThreshold) or m
/// exceeds `m_max`. Instances for different m share design rows.
struct RecoverySearch {
  std::optional<std::size_t> recovered_at;
  std::vector<std::size_t> tried;
  std::vector<double> errors;
};
RecoverySearch find_recovery_sample_size(const SweepSpec& spec, std::uint64_t seed,
                                         std::size_t m_start, std::size_t m_max);

void write_sweep_csv(std::ostream& out, const SweepResult& result);

/// JSON with per-grid summaries and, for breakdown-style sweeps, the
/// estimated breakdown of each method.
std::string sweep_summary_json(const SweepSpec& spec, const SweepResult& result);

}  // namespace robustl1
