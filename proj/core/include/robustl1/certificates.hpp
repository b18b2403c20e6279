#pragma once

// Computable witnesses for the robustness argument: empirical tail/bulk
// masses, the worst-case recovery gap of a direction, Monte-Carlo robustness
// constants over sparse directions, the shelling sandwich and the DKW band.

#include <cstdint>
#include <iosfwd>

#include "robustl1/analytics.hpp"
#include "robustl1/numerics.hpp"

namespace robustl1 {

/// (1/m) · sum of the m - ⌊ηm⌋ smallest |samples|.
double empirical_g_hat(std::span<const double> samples, Fraction eta);
/// (1/m) · sum of the ⌊ηm⌋ largest |samples|.
double empirical_b_hat(std::span<const double> samples, Fraction eta);

/// ‖(Xv)_T̄‖₁ - ‖(Xv)_T‖₁ with T the ⌊ηm⌋ largest entries of |Xv|, which is
/// the minimum over all |T| ≤ ηm.
double direction_gap(const DenseMatrix& x, std::span<const double> v, Fraction eta);

/// ‖(Xv)_good‖₁ - ‖(Xv)_bad‖₁ for a given corrupted index set `bad`.
double observed_gap(const DenseMatrix& x, std::span<const double> v,
                    std::span<const std::size_t> bad);

struct RobustnessReport {
  double eta = 0.0;
  std::size_t k = 0;
  std::size_t trials = 0;
  /// Minimum over sampled unit directions of (1/m)·(bottom m-⌊ηm⌋ mass):
  /// an upper bound on the true S^min.
  double s_min_estimate = 0.0;
  /// Maximum over sampled unit directions of (1/m)·(top ⌊ηm⌋ mass):
  /// a lower bound on the true S^max.
  double s_max_estimate = 0.0;
  Vector witness_min;
  Vector witness_max;
  std::uint64_t seed = 0;
};

/// Samples `trials` random k-sparse unit directions; trial t uses seed + t.
RobustnessReport estimate_robust_constants(const DenseMatrix& x, std::size_t k, Fraction eta,
                                           std::size_t trials, std::uint64_t seed);

/// key=value text form of a report (witnesses excluded).
void write_report(std::ostream& out, const RobustnessReport& report);

struct ShellingBounds {
  double lower = 0.0;  // L
  double upper = 0.0;  // U
  double alpha = 0.0;
  std::size_t k = 0;
  double delta = 0.0;
  double lower_coefficient = 0.0;  // L(α - U/L)/(1+α)
  double lower_slack = 0.0;        // 2UΔ/(α√k)
  double upper_coefficient = 0.0;  // U(1 + 1/α)
  double upper_slack = 0.0;        // UΔ/(α√k)

  double lower_bound(double v_norm) const { return lower_coefficient * v_norm - lower_slack; }
  double upper_bound(double v_norm) const { return upper_coefficient * v_norm + upper_slack; }
};

/// Requires 0 < L ≤ U, α > 1, k ≥ 1, Δ ≥ 0.
ShellingBounds shelling_bounds(double lower, double upper, double alpha, std::size_t k,
                               double delta);

struct ShellingCheck {
  bool passed = false;
  double worst_margin = 0.0;  // min over samples of the slack on either side
  std::size_t vectors_checked = 0;
  ShellingBounds bounds;
};

/// Monte-Carlo check of the shelling sandwich on the cone
/// {v : Δ + ‖v_S‖₁ ≥ ‖v_S̄‖₁}. L and U are measured over random
/// ⌈(1+α²)k⌉-sparse vectors together with the shelling blocks of every
/// sampled cone vector; every `boundary_every`-th sample sits on the cone
/// boundary.
ShellingCheck verify_shelling_numerically(const DenseMatrix& a,
                                          std::span<const std::size_t> support, double alpha,
                                          double delta, std::size_t trials, std::uint64_t seed,
                                          std::size_t boundary_every = 4);

/// 2·exp(-2mτ²), valid for τ ≥ √(ln 2 / (2m)).
double dkw_band(std::size_t m, double tau);

/// Kolmogorov distance sup_x |F̂_m(x) - Φ(x)| of a sample.
double sup_cdf_deviation(std::span<const double> samples);

/// Fraction of `repetitions` standard-normal samples of size m whose sup-CDF
/// deviation exceeds τ.
double empirical_dkw_violation_rate(std::size_t m, double tau, std::size_t repetitions,
                                    std::uint64_t seed);

/// m i.i.d. standard normal draws from the counter generator.
Vector normal_samples(std::size_t m, std::uint64_t seed);

}  // namespace robustl1
