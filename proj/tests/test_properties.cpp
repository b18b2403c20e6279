#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "robustl1/certificates.hpp"
#include "robustl1/problems.hpp"
#include "robustl1/random.hpp"
#include "robustl1/solvers.hpp"

using namespace robustl1;

namespace {

// Generator for small dense regression instances with a few gross outliers.
struct TinyInstance {
  DenseMatrix x;
  Vector y;
};

TinyInstance tiny_instance(std::uint64_t seed, std::size_t max_m, std::size_t max_n) {
  const CounterRng rng(seed, 1234);
  const std::size_t n = 1 + rng.below(0, max_n);
  const std::size_t m = n + rng.below(1, max_m - n + 1);
  TinyInstance t{DenseMatrix(m, n), Vector(m)};
  std::uint64_t c = 10;
  Vector w(n);
  for (auto& v : w) v = 2.0 * rng.normal(c++);
  for (std::size_t i = 0; i < m * n; ++i) t.x.data()[i] = rng.normal(c++);
  t.y = matvec(t.x, w);
  for (std::size_t i = 0; i < m; ++i) {
    if (rng.uniform(c++) < 0.3) t.y[i] += 10.0 * rng.normal(c++);
    t.y[i] += 0.01 * rng.normal(c++);
  }
  return t;
}

constexpr std::uint64_t kCases = 200;

}  // namespace

TEST(Property, L1MatchesEnumerationOracle) {
  for (std::uint64_t seed = 0; seed < kCases; ++seed) {
    const TinyInstance t = tiny_instance(seed, 10, 2);
    const double best = l1_objective(t.x, t.y, oracle_l1_enum(t.x, t.y));
    const SolverResult r = l1_regress(t.x, t.y);
    EXPECT_LE(std::fabs(r.objective - best), 1e-6 * (1.0 + l1_norm(t.y)))
        << "seed " << seed << " m=" << t.x.rows() << " n=" << t.x.cols();
  }
}

TEST(Property, ConstrainedEstimateIsFeasible) {
  for (std::uint64_t seed = 0; seed < kCases; ++seed) {
    const TinyInstance t = tiny_instance(seed + 1000, 12, 3);
    const CounterRng rng(seed, 77);
    const double lambda = 3.0 * rng.uniform(0);
    const SolverResult r = l1_regress_constrained(t.x, t.y, lambda);
    EXPECT_LE(l1_norm(r.estimate), lambda * (1.0 + 1e-9)) << "seed " << seed;
    EXPECT_LE(r.objective, l1_norm(t.y) * (1.0 + 1e-9) + 1e-9) << "seed " << seed;
  }
}

TEST(Property, L1IsScaleEquivariant) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const TinyInstance t = tiny_instance(seed + 2000, 12, 3);
    const SolverResult a = l1_regress(t.x, t.y);
    const double c = -3.5;
    Vector scaled(t.y);
    for (auto& v : scaled) v *= c;
    const SolverResult b = l1_regress(t.x, scaled);
    EXPECT_NEAR(b.objective, std::fabs(c) * a.objective, 1e-6 * (1.0 + l1_norm(scaled)));
  }
}

TEST(Property, WeightedMedianMinimizesWeightedDeviation) {
  for (std::uint64_t seed = 0; seed < kCases; ++seed) {
    const CounterRng rng(seed, 5);
    const std::size_t len = 1 + rng.below(0, 15);
    Vector v(len);
    Vector w(len);
    for (std::size_t i = 0; i < len; ++i) {
      v[i] = std::round(4.0 * rng.normal(2 * i));  // rounding produces ties
      w[i] = rng.uniform(2 * i + 1);
    }
    auto cost = [&](double t) {
      double s = 0.0;
      for (std::size_t i = 0; i < len; ++i) s += w[i] * std::fabs(v[i] - t);
      return s;
    };
    const double med = weighted_median(v, w);
    EXPECT_NE(std::find(v.begin(), v.end(), med), v.end());
    for (double cand : v) EXPECT_LE(cost(med), cost(cand) + 1e-12) << "seed " << seed;
  }
}

TEST(Property, SoftThresholdShrinksTowardZero) {
  for (std::uint64_t seed = 0; seed < kCases; ++seed) {
    const CounterRng rng(seed, 6);
    const std::size_t len = 1 + rng.below(0, 20);
    Vector v(len);
    for (std::size_t i = 0; i < len; ++i) v[i] = 3.0 * rng.normal(i + 1);
    const double theta = 2.0 * rng.uniform(0);
    const Vector s = soft_threshold(v, theta);
    for (std::size_t i = 0; i < len; ++i) {
      EXPECT_LE(std::fabs(s[i]), std::fabs(v[i]));
      EXPECT_GE(s[i] * v[i], 0.0);
      EXPECT_NEAR(std::fabs(v[i]) - std::fabs(s[i]), std::min(theta, std::fabs(v[i])), 1e-12);
    }
  }
}

TEST(Property, ProjectionIsNonExpansive) {
  for (std::uint64_t seed = 0; seed < kCases; ++seed) {
    const CounterRng rng(seed, 8);
    const std::size_t len = 1 + rng.below(0, 10);
    Vector a(len);
    Vector b(len);
    for (std::size_t i = 0; i < len; ++i) {
      a[i] = rng.normal(2 * i + 1);
      b[i] = rng.normal(2 * i + 2);
    }
    const double lambda = rng.uniform(0) * 2.0;
    const double before = l2_norm(subtract(a, b));
    const double after = l2_norm(subtract(project_l1_ball(a, lambda), project_l1_ball(b, lambda)));
    EXPECT_LE(after, before + 1e-12) << "seed " << seed;
  }
}

TEST(Property, ProblemsAreDeterministicInSeed) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    CorruptionSpec spec;
    spec.eta = Fraction(0.2);
    spec.kind = CorruptionKind::kTopkZeroing;
    auto build = [&](std::uint64_t s) {
      return assemble_problem(sample_gaussian_design(60, 6, s), sample_sparse_signal(6, 2, 1.0, s),
                              spec, gaussian_noise_with_l1(60, 1.0, s), s);
    };
    const Problem a = build(seed);
    const Problem b = build(seed);
    EXPECT_TRUE(a.x == b.x);
    EXPECT_EQ(a.y, b.y);
    EXPECT_EQ(a.corrupted_indices, b.corrupted_indices);
    EXPECT_NE(build(seed + 1).y, a.y);
  }
}

TEST(Property, TopkZeroingHitsExactlyTheLargestResponses) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const CounterRng rng(seed, 9);
    const std::size_t m = 5 + rng.below(0, 200);
    const double eta = 0.45 * rng.uniform(1);
    const DenseMatrix x = sample_gaussian_design(m, 3, seed);
    const Vector w = sample_sparse_signal(3, 3, 1.0, seed);
    const Corruption c = corrupt_topk_zeroing(x, w, Fraction(eta));
    const Vector clean = matvec(x, w);
    EXPECT_EQ(c.indices.size(), fraction_floor(eta, m));
    EXPECT_EQ(c.indices, [&] {
      auto top = top_abs_indices(clean, c.indices.size());
      std::sort(top.begin(), top.end());
      return top;
    }());
    for (std::size_t i : c.indices) EXPECT_EQ(clean[i] + c.values[i], 0.0);
  }
}

TEST(Property, DirectionGapIsWorstCaseOverRandomSets) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const CounterRng rng(seed, 10);
    const std::size_t m = 10 + rng.below(0, 100);
    const DenseMatrix x = sample_gaussian_design(m, 4, seed);
    const Vector v{rng.normal(1), rng.normal(2), rng.normal(3), rng.normal(4)};
    const Fraction eta(0.4 * rng.uniform(5));
    const std::size_t count = fraction_floor(eta, m);
    IndexSet bad;
    for (std::size_t i = 0; i < m && bad.size() < count; ++i) {
      if (rng.uniform(100 + i) < 0.5) bad.push_back(i);
    }
    EXPECT_LE(direction_gap(x, v, eta), observed_gap(x, v, bad) + 1e-12) << "seed " << seed;
  }
}
