#pragma once

// Estimators for y = X w* + ζ + d.
//
// The L1 estimators use a two-block operator-splitting (ADMM) scheme: the
// residual copy z = Xw - y takes a soft-threshold step, the optional copy of
// w takes an L1-ball projection, and the w-step solves a cached Cholesky
// system. Baselines (least squares, TORRENT-style hard thresholding, a 1-D
// filter) and small exact oracles live here as well.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "robustl1/analytics.hpp"
#include "robustl1/numerics.hpp"

namespace robustl1 {

struct SolverOptions {
  std::size_t max_iterations = 50000;
  double primal_tolerance = 1e-8;   // absolute part of the stopping rule
  double dual_tolerance = 1e-8;     // absolute part of the stopping rule
  double relative_tolerance = 1e-6;
  double penalty = 1.0;
  double irls_smoothing = 1e-2;
  std::uint64_t seed = 0;
  /// Residual balancing of the ADMM penalty during the first
  /// kPenaltyAdaptIterations iterations; the penalty is frozen afterwards.
  bool adaptive_penalty = true;
  /// Snap the L1 estimate to the best nearby basic solution.
  bool polish = true;
  /// Extra IRLS starts from random basic solutions (lp_regress only).
  std::size_t lp_restarts = 8;
  bool record_history = false;

  /// Throws std::invalid_argument on nonpositive tolerances, penalty or
  /// smoothing, or zero iterations.
  void validate() const;
};

inline constexpr std::size_t kPenaltyAdaptIterations = 2000;

enum class Termination { kConverged, kMaxIterations, kStalled, kExact };

std::string_view termination_name(Termination t);

struct SolverResult {
  Vector estimate;
  std::size_t iterations = 0;
  double final_primal_residual = 0.0;
  double final_dual_residual = 0.0;
  double objective = 0.0;  // ‖y - Xŵ‖₁, or Σ|rᵢ|^p for lp_regress
  bool converged = false;
  Termination termination = Termination::kMaxIterations;
  /// Per-iteration primal residual norms (record_history only).
  std::vector<double> residual_history;
  /// Per-iteration ρ‖Δ(auxiliary)‖² + ρ‖Δ(scaled dual)‖², the quantity a
  /// fixed-penalty ADMM run never increases (record_history only).
  std::vector<double> merit_history;
};

/// argmin_w ‖y - Xw‖₁. Requires m ≥ n and full column rank.
SolverResult l1_regress(const DenseMatrix& x, std::span<const double> y,
                        const SolverOptions& opts = {});

/// argmin_{‖w‖₁ ≤ λ} ‖y - Xw‖₁. The returned estimate is always feasible.
SolverResult l1_regress_constrained(const DenseMatrix& x, std::span<const double> y,
                                    double lambda, const SolverOptions& opts = {});

Vector soft_threshold(std::span<const double> v, double theta);

/// Euclidean projection onto {u : ‖u‖₁ ≤ λ}.
Vector project_l1_ball(std::span<const double> v, double lambda);

/// Heuristic local minimizer of Σ|yᵢ - ⟨xᵢ, w⟩|^p for 0 < p < 1 by IRLS on
/// the smoothed objective Σ(rᵢ² + μ²)^{p/2}, started from the L1 solution
/// and from `lp_restarts` random basic solutions; the best run is returned.
SolverResult lp_regress(const DenseMatrix& x, std::span<const double> y, double p,
                        const SolverOptions& opts = {});

/// Normal-equations least squares. Throws RankDeficientError.
SolverResult least_squares(const DenseMatrix& x, std::span<const double> y);

class RankDeficientError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Alternates a least-squares fit on the trusted rows with re-trusting the
/// m - ⌊ηm⌋ rows of smallest residual, until the trusted set repeats.
SolverResult torrent_iht(const DenseMatrix& x, std::span<const double> y, Fraction eta,
                         const SolverOptions& opts = {});

/// One-dimensional filter: ratio samples yᵢ/xᵢ weighted by |xᵢ|; while the
/// weighted variance exceeds its threshold scaled by (1 + 2η), the sample
/// farthest from the weighted mean is removed. Returns the survivors' mean.
SolverResult filter_regress_1d(std::span<const double> x, std::span<const double> y,
                               Fraction eta, const SolverOptions& opts = {});

/// Exhaustive L1 regression over all n-row interpolants (m ≤ 12, n ≤ 3).
Vector oracle_l1_enum(const DenseMatrix& x, std::span<const double> y);

/// Smallest value whose cumulative weight reaches half the total weight.
/// Equal values are ordered by index.
double weighted_median(std::span<const double> values, std::span<const double> weights);

/// ‖y - Xw‖₁ with compensated summation.
double l1_objective(const DenseMatrix& x, std::span<const double> y,
                    std::span<const double> w);
/// Σ|yᵢ - ⟨xᵢ, w⟩|^p.
double lp_objective(const DenseMatrix& x, std::span<const double> y,
                    std::span<const double> w, double p);

/// ‖ŵ - w*‖₂ / ‖w*‖₂ (absolute error when w* = 0).
double relative_error(std::span<const double> estimate, std::span<const double> truth);

/// Relative error at or below which recovery counts as exact.
inline constexpr double kExactRecoveryThreshold = 1e-3;

}  // namespace robustl1
