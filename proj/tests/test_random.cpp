#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "robustl1/random.hpp"

using namespace robustl1;

TEST(CounterRng, DeterministicAndStreamSeparated) {
  const CounterRng a(42, 1);
  const CounterRng b(42, 1);
  const CounterRng c(42, 2);
  const CounterRng d(43, 1);
  for (std::uint64_t i = 0; i < 100; ++i) {
    EXPECT_EQ(a.bits(i), b.bits(i));
    EXPECT_NE(a.bits(i), c.bits(i));
    EXPECT_NE(a.bits(i), d.bits(i));
  }
}

TEST(CounterRng, UniformIsOpenInterval) {
  const CounterRng rng(7, 3);
  double sum = 0.0;
  const std::size_t n = 100000;
  for (std::uint64_t i = 0; i < n; ++i) {
    const double u = rng.uniform(i);
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / n, 0.5, 0.005);
}

TEST(CounterRng, NormalMoments) {
  const CounterRng rng(11, 5);
  const std::size_t n = 200000;
  double s1 = 0.0, s2 = 0.0, s4 = 0.0;
  for (std::uint64_t i = 0; i < n; ++i) {
    const double z = rng.normal(i);
    s1 += z;
    s2 += z * z;
    s4 += z * z * z * z;
  }
  EXPECT_NEAR(s1 / n, 0.0, 0.01);
  EXPECT_NEAR(s2 / n, 1.0, 0.015);
  EXPECT_NEAR(s4 / n, 3.0, 0.06);
}

TEST(CounterRng, BelowStaysInRangeAndCoversIt) {
  const CounterRng rng(3, 9);
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 2000; ++i) {
    const auto v = rng.below(i, 7);
    ASSERT_LT(v, 7u);
    seen.insert(v);
  }
  EXPECT_EQ(seen.size(), 7u);
  EXPECT_EQ(rng.below(0, 1), 0u);
}

TEST(Hashing, MixesAndLabelsDiffer) {
  EXPECT_NE(mix64(0), mix64(1));
  EXPECT_NE(hash_combine(1, 2), hash_combine(2, 1));
  EXPECT_NE(hash_label(0, "breakdown_1d"), hash_label(0, "sample_complexity"));
  EXPECT_EQ(hash_label(5, "x"), hash_label(5, "x"));
}
