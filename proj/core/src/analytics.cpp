#include "robustl1/analytics.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

#include "robustl1/numerics.hpp"

namespace robustl1 {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kSqrt2 = 1.41421356237309504880;
constexpr double kTailSpan = 40.0;

// Wichura's AS241 (PPND16) for p in (0, 0.5]; relative accuracy ~1e-16.
double quantile_initial_lower(double p) {
  const double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((2509.0809287301226727 * r + 33430.575583588128105) * r +
                 67265.770927008700853) * r + 45921.953931549871457) * r +
               13731.693765509461125) * r + 1971.5909503065514427) * r +
             133.14166789178437745) * r + 3.387132872796366608) /
           (((((((5226.495278852545925 * r + 28729.085735721942674) * r +
                 39307.89580009271061) * r + 21213.794301586595867) * r +
               5394.1960214247511077) * r + 687.1870074920579083) * r +
             42.313330701600911252) * r + 1.0);
  }
  double r = std::sqrt(-std::log(p));
  double value;
  if (r <= 5.0) {
    r -= 1.6;
    value = (((((((7.7454501427834140764e-4 * r + 0.0227238449892691845833) * r +
                  0.24178072517745061177) * r + 1.27045825245236838258) * r +
                3.64784832476320460504) * r + 5.7694972214606914055) * r +
              4.6303378461565452959) * r + 1.42343711074968357734) /
            (((((((1.05075007164441684324e-9 * r + 5.475938084995344946e-4) * r +
                  0.0151986665636164571966) * r + 0.14810397642748007459) * r +
                0.68976733498510000455) * r + 1.6763848301838038494) * r +
              2.05319162663775882187) * r + 1.0);
  } else {
    r -= 5.0;
    value = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                  0.0012426609473880784386) * r + 0.026532189526576123093) * r +
                0.29656057182850489123) * r + 1.7848265399172913358) * r +
              5.4637849111641143699) * r + 6.6579046435011037772) /
            (((((((2.04426310338993978564e-15 * r + 1.4215117583164458887e-7) * r +
                  1.8463183175100546818e-5) * r + 7.868691311456132591e-4) * r +
                0.0148753612908506148525) * r + 0.13692988092273580531) * r +
              0.59983220655588793769) * r + 1.0);
  }
  return -value;
}

// Newton-Halley refinement of Φ(x) = p in the lower tail, where erfc keeps
// full relative precision.
double refine_lower_quantile(double x, double p) {
  for (int iter = 0; iter < 4; ++iter) {
    const double err = 0.5 * std::erfc(-x / kSqrt2) - p;
    const double density = std::exp(-0.5 * x * x) / std::sqrt(2.0 * kPi);
    if (density == 0.0) break;
    const double u = err / density;
    const double step = u / (1.0 + 0.5 * x * u);
    x -= step;
    if (std::fabs(step) <= 1e-15 * std::max(1.0, std::fabs(x))) break;
  }
  return x;
}

struct Kronrod {
  static constexpr std::array<double, 8> nodes{
      0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
      0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
      0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
      0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
  static constexpr std::array<double, 8> kronrod_weights{
      0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
      0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
      0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
      0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
  static constexpr std::array<double, 4> gauss_weights{
      0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
      0.381830050505118944950369775488975, 0.417959183673469387755102040816327};
};

struct Estimate {
  double value;
  double error;
};

Estimate gauss_kronrod_15(const std::function<double(double)>& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * Kronrod::kronrod_weights[7];
  double gauss = fc * Kronrod::gauss_weights[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * Kronrod::nodes[static_cast<std::size_t>(j)];
    const double sum = f(center - dx) + f(center + dx);
    kronrod += Kronrod::kronrod_weights[static_cast<std::size_t>(j)] * sum;
    if (j % 2 == 1) gauss += Kronrod::gauss_weights[static_cast<std::size_t>(j / 2)] * sum;
  }
  return {kronrod * half, std::fabs((kronrod - gauss) * half)};
}

double adaptive_step(const std::function<double(double)>& f, double a, double b,
                     double tol, int depth, const Estimate& whole) {
  if (whole.error <= tol || depth <= 0 || b - a <= 1e-300) return whole.value;
  const double mid = 0.5 * (a + b);
  const Estimate left = gauss_kronrod_15(f, a, mid);
  const Estimate right = gauss_kronrod_15(f, mid, b);
  if (std::fabs(left.value + right.value - whole.value) <= 1e-3 * tol &&
      left.error + right.error <= tol) {
    return left.value + right.value;
  }
  return adaptive_step(f, a, mid, 0.5 * tol, depth - 1, left) +
         adaptive_step(f, mid, b, 0.5 * tol, depth - 1, right);
}

void require_exponent(double p) {
  if (!(p > 0.0) || p > 1.0) {
    throw std::invalid_argument("exponent p must lie in (0, 1], got " + std::to_string(p));
  }
}

}  // namespace

Fraction::Fraction(double value) : value_(value) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw std::invalid_argument("fraction must lie in [0, 1], got " + std::to_string(value));
  }
}

double std_normal_cdf(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("std_normal_cdf: non-finite input");
  return 0.5 * std::erfc(-x / kSqrt2);
}

double std_normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("std_normal_quantile: p must lie in (0, 1), got " +
                                std::to_string(p));
  }
  if (p > 0.5) {
    // 1 - p is exact for p in [0.5, 1).
    return -std_normal_quantile(1.0 - p);
  }
  if (p == 0.5) return 0.0;
  return refine_lower_quantile(quantile_initial_lower(p), p);
}

double inv_erf(double y) {
  if (!(y > -1.0 && y < 1.0)) {
    throw std::invalid_argument("inv_erf: argument must lie in (-1, 1), got " +
                                std::to_string(y));
  }
  if (y == 0.0) return 0.0;
  if (y < 0.0) return -inv_erf(-y);
  // erf(x) = y  <=>  Φ(x√2) = (1 + y)/2  <=>  x = -Φ⁻¹((1 - y)/2)/√2.
  const double tail = 0.5 * (1.0 - y);
  double x = -std_normal_quantile(tail) / kSqrt2;
  const double two_over_sqrt_pi = 2.0 / std::sqrt(kPi);
  for (int iter = 0; iter < 6; ++iter) {
    const double slope = two_over_sqrt_pi * std::exp(-x * x);
    if (slope == 0.0) break;
    // Residual taken against erfc when y is large so the target stays exact.
    const double residual = y >= 0.5 ? (1.0 - y) - std::erfc(x) : std::erf(x) - y;
    const double step = residual / slope;
    x -= step;
    if (std::fabs(step) <= 1e-16 * std::max(1.0, std::fabs(x))) break;
  }
  return x;
}

double big_b(Fraction gamma) {
  const double g = gamma.value();
  if (g == 0.0) return 0.0;
  const double t = -std_normal_quantile(0.5 * g);
  return kSqrt2OverPi * std::exp(-0.5 * t * t);
}

double big_g(Fraction gamma) {
  const double g = gamma.value();
  if (g == 0.0) return kSqrt2OverPi;
  const double t = -std_normal_quantile(0.5 * g);
  return -kSqrt2OverPi * std::expm1(-0.5 * t * t);
}

Fraction eta0() {
  double lo = 0.0;
  double hi = 1.0;
  for (int iter = 0; iter < 200 && hi - lo > 1e-16; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (big_g(Fraction(mid)) - big_b(Fraction(mid)) >= 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return Fraction(0.5 * (lo + hi));
}

double eta0_closed_form() {
  return 2.0 * (1.0 - std_normal_cdf(std::sqrt(2.0 * std::log(2.0))));
}

double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double abs_tol, int max_depth) {
  if (a == b) return 0.0;
  if (b < a) return -integrate_adaptive(f, b, a, abs_tol, max_depth);
  return adaptive_step(f, a, b, abs_tol, max_depth, gauss_kronrod_15(f, a, b));
}

double abs_moment_p(double p) {
  return std::pow(2.0, 0.5 * p) * std::tgamma(0.5 * (p + 1.0)) / std::sqrt(kPi);
}

TailMoments tail_moments_p(Fraction gamma, double p) {
  require_exponent(p);
  const double g = gamma.value();
  const double two_density = 2.0 / std::sqrt(2.0 * kPi);
  auto integrand = [p, two_density](double z) {
    return z <= 0.0 ? 0.0 : std::pow(z, p) * two_density * std::exp(-0.5 * z * z);
  };
  // The |z|^p singularity sits at 0; give the adaptive rule a short first
  // panel so the smooth remainder is not over-refined.
  auto bulk = [&](double upper) {
    if (upper <= 0.0) return 0.0;
    const double knee = std::min(upper, 1.0);
    return integrate_adaptive(integrand, 0.0, knee, 1e-14) +
           integrate_adaptive(integrand, knee, upper, 1e-14);
  };
  if (g == 0.0) return {bulk(kTailSpan), 0.0};
  const double t = g == 1.0 ? 0.0 : -std_normal_quantile(0.5 * g);
  return {bulk(t), integrate_adaptive(integrand, t, t + kTailSpan, 1e-14)};
}

Fraction breakdown_threshold(double p) {
  require_exponent(p);
  double lo = 0.0;
  double hi = 1.0;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    const TailMoments m = tail_moments_p(Fraction(mid), p);
    if (m.g_p - m.b_p >= 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return Fraction(0.5 * (lo + hi));
}

AnalyticsTable build_analytics_table(const std::vector<double>& grid, double p) {
  require_exponent(p);
  AnalyticsTable table;
  table.p = p;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Fraction gamma(grid[i]);
    if (i > 0 && !(grid[i] > grid[i - 1])) {
      throw std::invalid_argument("analytics grid must be strictly increasing");
    }
    table.grid.push_back(gamma);
    if (p == 1.0) {
      table.g_values.push_back(big_g(gamma));
      table.b_values.push_back(big_b(gamma));
    } else {
      const TailMoments m = tail_moments_p(gamma, p);
      table.g_values.push_back(m.g_p);
      table.b_values.push_back(m.b_p);
    }
  }
  return table;
}

void write_analytics_csv(std::ostream& out, const AnalyticsTable& table) {
  out << "gamma,p,g,b\n";
  for (std::size_t i = 0; i < table.grid.size(); ++i) {
    out << format_double(table.grid[i]) << ',' << format_double(table.p) << ','
        << format_double(table.g_values[i]) << ',' << format_double(table.b_values[i]) << '\n';
  }
}

}  // namespace robustl1
