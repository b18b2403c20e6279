#include "robustl1/certificates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "robustl1/random.hpp"

namespace robustl1 {

namespace {

void require_samples(std::span<const double> samples) {
  if (samples.empty()) throw std::invalid_argument("empirical mass of an empty sample");
}

// Draws `count` distinct indices out of `pool` using counters [offset, offset+count).
std::vector<std::size_t> choose(std::span<const std::size_t> pool, std::size_t count,
                                const CounterRng& rng, std::uint64_t offset) {
  std::vector<std::size_t> perm(pool.begin(), pool.end());
  count = std::min(count, perm.size());
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + rng.below(offset + i, perm.size() - i);
    std::swap(perm[i], perm[j]);
  }
  perm.resize(count);
  return perm;
}

double sparse_l1_image(const DenseMatrix& a, std::span<const double> v) {
  return l1_norm(matvec(a, v));
}

}  // namespace

double empirical_g_hat(std::span<const double> samples, Fraction eta) {
  require_samples(samples);
  const auto sums = top_abs_partial_sums(samples, fraction_floor(eta, samples.size()));
  return sums.rest_sum / static_cast<double>(samples.size());
}

double empirical_b_hat(std::span<const double> samples, Fraction eta) {
  require_samples(samples);
  const auto sums = top_abs_partial_sums(samples, fraction_floor(eta, samples.size()));
  return sums.top_sum / static_cast<double>(samples.size());
}

double direction_gap(const DenseMatrix& x, std::span<const double> v, Fraction eta) {
  const Vector image = matvec(x, v);
  const auto sums = top_abs_partial_sums(image, fraction_floor(eta, image.size()));
  return sums.rest_sum - sums.top_sum;
}

double observed_gap(const DenseMatrix& x, std::span<const double> v,
                    std::span<const std::size_t> bad) {
  const Vector image = matvec(x, v);
  std::vector<char> is_bad(image.size(), 0);
  for (std::size_t i : bad) {
    if (i >= image.size()) throw std::out_of_range("observed_gap: index out of range");
    is_bad[i] = 1;
  }
  Vector good_abs;
  Vector bad_abs;
  for (std::size_t i = 0; i < image.size(); ++i) {
    (is_bad[i] ? bad_abs : good_abs).push_back(std::fabs(image[i]));
  }
  return compensated_sum(good_abs) - compensated_sum(bad_abs);
}

RobustnessReport estimate_robust_constants(const DenseMatrix& x, std::size_t k, Fraction eta,
                                           std::size_t trials, std::uint64_t seed) {
  const std::size_t m = x.rows();
  const std::size_t n = x.cols();
  if (trials == 0) throw std::invalid_argument("estimate_robust_constants: trials must be >= 1");
  if (k == 0 || k > n) throw std::invalid_argument("estimate_robust_constants: need 1 <= k <= n");
  const std::size_t budget = fraction_floor(eta, m);

  std::vector<std::size_t> columns(n);
  std::iota(columns.begin(), columns.end(), std::size_t{0});

  RobustnessReport report;
  report.eta = eta;
  report.k = k;
  report.trials = trials;
  report.seed = seed;
  report.s_min_estimate = std::numeric_limits<double>::infinity();
  report.s_max_estimate = -std::numeric_limits<double>::infinity();

  Vector image(m);
  for (std::size_t t = 0; t < trials; ++t) {
    const CounterRng rng = make_rng(seed + t, Stream::kDirection);
    const auto support = choose(columns, k, rng, 0);
    Vector direction(n, 0.0);
    for (std::size_t s = 0; s < support.size(); ++s) direction[support[s]] = rng.normal(n + s);
    const double norm = l2_norm(direction);
    if (norm == 0.0) continue;
    for (double& e : direction) e /= norm;

    std::fill(image.begin(), image.end(), 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      const auto row = x.row(i);
      double acc = 0.0;
      for (std::size_t j : support) acc += row[j] * direction[j];
      image[i] = acc;
    }
    const auto sums = top_abs_partial_sums(image, budget);
    const double s_max = sums.top_sum / static_cast<double>(m);
    const double s_min = sums.rest_sum / static_cast<double>(m);
    if (s_max > report.s_max_estimate) {
      report.s_max_estimate = s_max;
      report.witness_max = direction;
    }
    if (s_min < report.s_min_estimate) {
      report.s_min_estimate = s_min;
      report.witness_min = direction;
    }
  }
  return report;
}

void write_report(std::ostream& out, const RobustnessReport& report) {
  out << "eta=" << format_double(report.eta) << '\n'
      << "k=" << report.k << '\n'
      << "trials=" << report.trials << '\n'
      << "seed=" << report.seed << '\n'
      << "s_min_estimate=" << format_double(report.s_min_estimate) << '\n'
      << "s_max_estimate=" << format_double(report.s_max_estimate) << '\n'
      << "gap_estimate=" << format_double(report.s_min_estimate - report.s_max_estimate) << '\n';
}

ShellingBounds shelling_bounds(double lower, double upper, double alpha, std::size_t k,
                               double delta) {
  if (!(lower > 0.0) || !(upper > 0.0) || !std::isfinite(upper)) {
    throw std::invalid_argument("shelling_bounds: L and U must be positive and finite");
  }
  if (lower > upper) throw std::invalid_argument("shelling_bounds: requires L <= U");
  if (!(alpha > 1.0) || !std::isfinite(alpha)) {
    throw std::invalid_argument("shelling_bounds: requires alpha > 1");
  }
  if (k == 0) throw std::invalid_argument("shelling_bounds: requires k >= 1");
  if (!(delta >= 0.0) || !std::isfinite(delta)) {
    throw std::invalid_argument("shelling_bounds: requires delta >= 0");
  }
  ShellingBounds b;
  b.lower = lower;
  b.upper = upper;
  b.alpha = alpha;
  b.k = k;
  b.delta = delta;
  const double root_k = std::sqrt(static_cast<double>(k));
  b.lower_coefficient = lower * (alpha - upper / lower) / (1.0 + alpha);
  b.lower_slack = 2.0 * upper * delta / (alpha * root_k);
  b.upper_coefficient = upper * (1.0 + 1.0 / alpha);
  b.upper_slack = upper * delta / (alpha * root_k);
  return b;
}

ShellingCheck verify_shelling_numerically(const DenseMatrix& a,
                                          std::span<const std::size_t> support, double alpha,
                                          double delta, std::size_t trials, std::uint64_t seed,
                                          std::size_t boundary_every) {
  const std::size_t n = a.cols();
  const std::size_t k = support.size();
  if (k == 0 || k > n) throw std::invalid_argument("verify_shelling_numerically: need 1 <= |S| <= n");
  if (!(alpha > 1.0)) throw std::invalid_argument("verify_shelling_numerically: alpha must exceed 1");
  if (!(delta >= 0.0)) throw std::invalid_argument("verify_shelling_numerically: delta must be >= 0");

  std::vector<char> in_support(n, 0);
  for (std::size_t j : support) {
    if (j >= n || in_support[j]) {
      throw std::invalid_argument("verify_shelling_numerically: support must hold distinct columns");
    }
    in_support[j] = 1;
  }
  std::vector<std::size_t> off_support;
  for (std::size_t j = 0; j < n; ++j)
    if (!in_support[j]) off_support.push_back(j);

  const auto block = static_cast<std::size_t>(std::ceil(alpha * alpha * static_cast<double>(k) - 1e-9));
  const std::size_t sparse_level = std::min(n, k + block);

  double lower = std::numeric_limits<double>::infinity();
  double upper = 0.0;
  auto observe = [&](std::span<const double> v) {
    const double norm = l2_norm(v);
    if (norm == 0.0) return;
    const double ratio = sparse_l1_image(a, v) / norm;
    lower = std::min(lower, ratio);
    upper = std::max(upper, ratio);
  };

  const CounterRng rng = make_rng(seed, Stream::kDirection);
  std::uint64_t counter = 0;

  // Cone samples v = v_S + v_S̄ with ‖v_S̄‖₁ = u(Δ + ‖v_S‖₁).
  std::vector<Vector> cone;
  cone.reserve(trials);
  for (std::size_t t = 0; t < trials; ++t) {
    Vector v(n, 0.0);
    for (std::size_t j : support) v[j] = rng.normal(counter++);
    const double head = l1_norm(v);
    if (!off_support.empty()) {
      // Alternate dense and sparse tails.
      std::size_t tail_size = off_support.size();
      if (t % 2 == 1) tail_size = 1 + rng.below(counter++, off_support.size());
      const auto tail = choose(off_support, tail_size, rng, counter);
      counter += tail_size;
      Vector tail_values(tail.size());
      for (auto& e : tail_values) e = rng.normal(counter++);
      const double tail_norm = l1_norm(tail_values);
      const bool boundary = boundary_every > 0 && t % boundary_every == 0;
      const double share = boundary ? 1.0 : rng.uniform(counter++);
      const double target = share * (delta + head);
      if (tail_norm > 0.0) {
        for (std::size_t s = 0; s < tail.size(); ++s) v[tail[s]] = tail_values[s] * target / tail_norm;
      }
    }
    cone.push_back(std::move(v));
  }

  // Shelling blocks of each cone vector: S ∪ T₁, then T₂, T₃, ... of size
  // `block`, ordered by decreasing |v| off the support.
  for (const Vector& v : cone) {
    std::vector<std::size_t> order = off_support;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t p, std::size_t q) { return std::fabs(v[p]) > std::fabs(v[q]); });
    Vector head(n, 0.0);
    for (std::size_t j : support) head[j] = v[j];
    for (std::size_t s = 0; s < std::min(block, order.size()); ++s) head[order[s]] = v[order[s]];
    observe(head);
    for (std::size_t start = block; start < order.size(); start += block) {
      Vector piece(n, 0.0);
      for (std::size_t s = start; s < std::min(start + block, order.size()); ++s) {
        piece[order[s]] = v[order[s]];
      }
      observe(piece);
    }
  }

  std::vector<std::size_t> all_columns(n);
  std::iota(all_columns.begin(), all_columns.end(), std::size_t{0});
  for (std::size_t t = 0; t < trials; ++t) {
    const auto cols = choose(all_columns, sparse_level, rng, counter);
    counter += sparse_level;
    Vector v(n, 0.0);
    for (std::size_t j : cols) v[j] = rng.normal(counter++);
    observe(v);
  }

  ShellingCheck check;
  check.bounds = shelling_bounds(lower, upper, alpha, k, delta);
  check.worst_margin = std::numeric_limits<double>::infinity();
  double scale = 0.0;
  for (const Vector& v : cone) {
    const double norm = l2_norm(v);
    const double image = sparse_l1_image(a, v);
    scale = std::max(scale, image);
    const double margin = std::min(image - check.bounds.lower_bound(norm),
                                   check.bounds.upper_bound(norm) - image);
    check.worst_margin = std::min(check.worst_margin, margin);
    ++check.vectors_checked;
  }
  check.passed = check.vectors_checked == 0 || check.worst_margin >= -1e-9 * std::max(1.0, scale);
  return check;
}

double dkw_band(std::size_t m, double tau) {
  if (m == 0) throw std::invalid_argument("dkw_band: m must be positive");
  const double floor = std::sqrt(std::log(2.0) / (2.0 * static_cast<double>(m)));
  if (!(tau >= floor)) {
    throw std::invalid_argument("dkw_band: tau below the validity floor sqrt(ln 2 / 2m)");
  }
  return 2.0 * std::exp(-2.0 * static_cast<double>(m) * tau * tau);
}

double sup_cdf_deviation(std::span<const double> samples) {
  require_samples(samples);
  Vector sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double m = static_cast<double>(sorted.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double cdf = std_normal_cdf(sorted[i]);
    worst = std::max({worst, static_cast<double>(i + 1) / m - cdf, cdf - static_cast<double>(i) / m});
  }
  return worst;
}

Vector normal_samples(std::size_t m, std::uint64_t seed) {
  const CounterRng rng = make_rng(seed, Stream::kNoise);
  Vector out(m);
  for (std::size_t i = 0; i < m; ++i) out[i] = rng.normal(i);
  return out;
}

double empirical_dkw_violation_rate(std::size_t m, double tau, std::size_t repetitions,
                                    std::uint64_t seed) {
  if (repetitions == 0) throw std::invalid_argument("repetitions must be >= 1");
  std::size_t violations = 0;
  for (std::size_t r = 0; r < repetitions; ++r) {
    if (sup_cdf_deviation(normal_samples(m, hash_combine(seed, r))) > tau) ++violations;
  }
  return static_cast<double>(violations) / static_cast<double>(repetitions);
}

}  // namespace robustl1
