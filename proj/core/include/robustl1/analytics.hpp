#pragma once

// Standard-normal quantities behind the breakdown analysis: Φ, Φ⁻¹, erf⁻¹,
// the tail/bulk masses B(γ) and G(γ) of |Z|, their p-th moment analogues,
// and the resulting breakdown fractions.

#include <functional>
#include <iosfwd>
#include <vector>

namespace robustl1 {

/// A fraction of samples, checked to lie in [0, 1].
class Fraction {
 public:
  constexpr Fraction() = default;
  explicit Fraction(double value);

  constexpr double value() const { return value_; }
  constexpr operator double() const { return value_; }

 private:
  double value_ = 0.0;
};

inline constexpr double kSqrt2OverPi = 0.79788456080286535588;

double std_normal_cdf(double x);
/// Φ⁻¹(p) for 0 < p < 1.
double std_normal_quantile(double p);
/// erf⁻¹(y) for -1 < y < 1.
double inv_erf(double y);

/// E[|Z|; |Z| > Φ⁻¹(1 - γ/2)]: mass of the largest γ fraction of |Z|.
double big_b(Fraction gamma);
/// E[|Z|; |Z| ≤ Φ⁻¹(1 - γ/2)]: mass of the smallest 1-γ fraction of |Z|.
double big_g(Fraction gamma);

/// Root of G(η) = B(η), found by bisection. Approximately 0.2390.
Fraction eta0();
/// 2(1 - Φ(√(2 ln 2))), the closed form of eta0().
double eta0_closed_form();

struct TailMoments {
  double g_p = 0.0;  // E[|Z|^p; |Z| ≤ t]
  double b_p = 0.0;  // E[|Z|^p; |Z| > t]
};

/// p-th moment split of |Z| at t = Φ⁻¹(1 - γ/2), by adaptive Gauss–Kronrod.
TailMoments tail_moments_p(Fraction gamma, double p);
/// E|Z|^p = 2^{p/2} Γ((p+1)/2) / √π.
double abs_moment_p(double p);

/// The fraction γ at which g_p(γ) = b_p(γ).
Fraction breakdown_threshold(double p);

/// Adaptive 7/15-point Gauss–Kronrod quadrature on [a, b].
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double abs_tol = 1e-13, int max_depth = 60);

struct AnalyticsTable {
  double p = 1.0;
  std::vector<double> grid;
  std::vector<double> g_values;
  std::vector<double> b_values;
};

/// Evaluates g_p/b_p on a strictly increasing grid. For p = 1 the closed
/// forms are used.
AnalyticsTable build_analytics_table(const std::vector<double>& grid, double p);
/// CSV with header `gamma,p,g,b`.
void write_analytics_csv(std::ostream& out, const AnalyticsTable& table);

}  // namespace robustl1
