#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "robustl1/analytics.hpp"
#include "robustl1/problems.hpp"

using namespace robustl1;

namespace {

std::string temp_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("robustl1_" + name);
  std::filesystem::remove_all(dir);
  return dir.string();
}

}  // namespace

TEST(GaussianDesign, SameSeedSameMatrix) {
  EXPECT_TRUE(sample_gaussian_design(20, 3, 9) == sample_gaussian_design(20, 3, 9));
  EXPECT_FALSE(sample_gaussian_design(20, 3, 9) == sample_gaussian_design(20, 3, 10));
  EXPECT_THROW(sample_gaussian_design(0, 3, 1), std::invalid_argument);
}

TEST(GaussianDesign, MomentsAtLargeM) {
  const DenseMatrix x = sample_gaussian_design(100000, 1, 4);
  double mean = 0.0;
  for (double v : x.data()) mean += v;
  mean /= 1e5;
  double var = 0.0;
  for (double v : x.data()) var += (v - mean) * (v - mean);
  var /= 1e5;
  EXPECT_NEAR(mean, 0.0, 0.02);
  EXPECT_NEAR(var, 1.0, 0.02);
}

TEST(GaussianDesign, ColumnsUncorrelated) {
  const DenseMatrix x = sample_gaussian_design(100000, 2, 5);
  double s01 = 0.0, s00 = 0.0, s11 = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    s01 += x(i, 0) * x(i, 1);
    s00 += x(i, 0) * x(i, 0);
    s11 += x(i, 1) * x(i, 1);
  }
  EXPECT_LE(std::fabs(s01 / std::sqrt(s00 * s11)), 0.02);
}

TEST(GaussianDesign, SmallerDesignIsAPrefix) {
  const DenseMatrix big = sample_gaussian_design(40, 5, 3);
  const DenseMatrix small = sample_gaussian_design(10, 5, 3);
  for (std::size_t i = 0; i < 10; ++i)
    for (std::size_t j = 0; j < 5; ++j) EXPECT_EQ(small(i, j), big(i, j));
}

TEST(SparseSignal, SupportSizeAndNorm) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const Vector w = sample_sparse_signal(50, 7, 2.5, seed);
    std::size_t nnz = 0;
    for (double v : w) {
      if (v != 0.0) {
        ++nnz;
        EXPECT_EQ(std::fabs(v), 2.5);
      }
    }
    EXPECT_EQ(nnz, 7u);
    EXPECT_DOUBLE_EQ(l1_norm(w), 7 * 2.5);
  }
  const Vector dense = sample_sparse_signal(6, 6, 1.0, 1);
  for (double v : dense) EXPECT_EQ(std::fabs(v), 1.0);
  EXPECT_THROW(sample_sparse_signal(3, 4, 1.0, 0), std::invalid_argument);
  EXPECT_THROW(sample_sparse_signal(3, 0, 1.0, 0), std::invalid_argument);
}

TEST(TopkZeroing, SpecExamples) {
  const DenseMatrix x = DenseMatrix::column(Vector{1, -3, 2});
  const Corruption c = corrupt_topk_zeroing(x, Vector{1.0}, Fraction(1.0 / 3.0));
  EXPECT_EQ(c.values, (Vector{0, 3, 0}));
  EXPECT_EQ(c.indices, (IndexSet{1}));
  const Corruption none = corrupt_topk_zeroing(x, Vector{1.0}, Fraction(0.0));
  EXPECT_EQ(none.values, (Vector{0, 0, 0}));
  EXPECT_TRUE(none.indices.empty());
}

TEST(TopkZeroing, ProducesFloorEtaMZeros) {
  const DenseMatrix x = sample_gaussian_design(1000, 3, 2);
  const Vector w{1.0, -2.0, 0.5};
  const Problem p = assemble_problem(x, w, {Fraction(0.17), CorruptionKind::kTopkZeroing, 0, 0.1},
                                     Vector{}, 2);
  std::size_t zeros = 0;
  for (double v : p.y) zeros += (v == 0.0);
  EXPECT_EQ(zeros, 170u);
  EXPECT_EQ(p.corrupted_indices.size(), 170u);
  for (std::size_t i : p.corrupted_indices) EXPECT_EQ(p.y[i], 0.0);
}

TEST(TopkZeroing, ScaleInvariantIndexSet) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const DenseMatrix x = sample_gaussian_design(200, 4, seed);
    const Vector w = sample_sparse_signal(4, 2, 1.0, seed);
    const Corruption base = corrupt_topk_zeroing(x, w, Fraction(0.2));
    for (double c : {0.5, 3.0, 1e3}) {
      EXPECT_EQ(corrupt_topk_zeroing(x, scale(w, c), Fraction(0.2)).indices, base.indices);
    }
  }
}

TEST(DenseAdversary, SupportSizeAndZeroCount) {
  const std::size_t m = 1000;
  const DenseMatrix x = sample_gaussian_design(m, 4, 3);
  const Vector w = sample_sparse_signal(4, 4, 1.0, 3);
  const double eps = 0.1;
  const Corruption d = adversarial_dense_noise(x, w, eps);
  const std::size_t expected = fraction_floor(1.0 - (eta0().value() + eps / 2.0), m);
  EXPECT_EQ(d.indices.size(), expected);
  const Problem p =
      assemble_problem(x, w, {Fraction(0.0), CorruptionKind::kDenseAdversary, 0, eps}, Vector{}, 3);
  std::size_t zeros = 0;
  for (double v : p.y) zeros += (v == 0.0);
  EXPECT_EQ(zeros, expected);
  EXPECT_GT(static_cast<double>(zeros), (1.0 - eta0().value()) * m - 0.5 * eps * m - 1.0);
  // The zeroed entries are the smallest |<x_i, w*>|.
  const Vector signal = matvec(x, w);
  double largest_zeroed = 0.0, smallest_kept = INFINITY;
  for (std::size_t i = 0; i < m; ++i) {
    if (p.y[i] == 0.0) largest_zeroed = std::max(largest_zeroed, std::fabs(signal[i]));
    else smallest_kept = std::min(smallest_kept, std::fabs(signal[i]));
  }
  EXPECT_LE(largest_zeroed, smallest_kept);
}

TEST(DenseAdversary, NoiseMassApproachesG) {
  const std::size_t m = 100000;
  const DenseMatrix x = sample_gaussian_design(m, 2, 8);
  const Vector w{0.6, -0.8};
  const double eps = 0.1;
  const Corruption d = adversarial_dense_noise(x, w, eps);
  EXPECT_NEAR(l1_norm(d.values) / m, big_g(Fraction(eta0().value() + eps / 2.0)) * l2_norm(w), 0.01);
}

TEST(DenseAdversary, EpsilonRangeChecked) {
  const DenseMatrix x = sample_gaussian_design(10, 1, 0);
  EXPECT_THROW(adversarial_dense_noise(x, Vector{1.0}, 0.0), std::invalid_argument);
  EXPECT_THROW(adversarial_dense_noise(x, Vector{1.0}, 0.2), std::invalid_argument);
  EXPECT_NO_THROW(adversarial_dense_noise(x, Vector{1.0}, 0.199));
}

TEST(RandomCorruption, BudgetAndDeterminism) {
  const Corruption a = random_corruption(100, Fraction(0.23), 5.0, 1);
  EXPECT_EQ(a.indices.size(), 23u);
  for (std::size_t i : a.indices) EXPECT_EQ(std::fabs(a.values[i]), 5.0);
  EXPECT_EQ(a.values, random_corruption(100, Fraction(0.23), 5.0, 1).values);
  EXPECT_TRUE(random_corruption(100, Fraction(0.0), 5.0, 1).indices.empty());
}

TEST(GaussianNoise, HasRequestedL1Norm) {
  EXPECT_NEAR(l1_norm(gaussian_noise_with_l1(500, 12.5, 3)), 12.5, 1e-10);
  EXPECT_EQ(l1_norm(gaussian_noise_with_l1(500, 0.0, 3)), 0.0);
}

TEST(AssembleProblem, CleanAndCorrupted) {
  const DenseMatrix x = sample_gaussian_design(30, 3, 1);
  const Vector w{1, 0, -1};
  const Problem clean = assemble_problem(x, w, {Fraction(0.0), CorruptionKind::kNone, 0, 0.1},
                                         Vector{}, 1);
  EXPECT_EQ(clean.y, matvec(x, w));
  EXPECT_NO_THROW(clean.check_invariants());
  EXPECT_THROW(assemble_problem(x, Vector{1, 2}, {Fraction(0.0), CorruptionKind::kNone, 0, 0.1},
                                Vector{}, 1),
               DimensionError);
}

TEST(AssembleProblem, GeneratorNoiseAndReconstruction) {
  const DenseMatrix x = sample_gaussian_design(50, 2, 6);
  const NoiseGenerator gen = [](std::size_t m, std::uint64_t seed) {
    return gaussian_noise_with_l1(m, 3.0, seed);
  };
  const Problem p = assemble_problem(x, Vector{2, -1},
                                     {Fraction(0.1), CorruptionKind::kRandomSign, 4.0, 0.1}, gen, 6);
  EXPECT_NEAR(l1_norm(p.d), 3.0, 1e-12);
  const Vector signal = matvec(p.x, p.w_star);
  for (std::size_t i = 0; i < 50; ++i) EXPECT_EQ(p.y[i], (signal[i] + p.zeta[i]) + p.d[i]);
}

TEST(ProblemInvariants, DetectsTampering) {
  const DenseMatrix x = sample_gaussian_design(20, 1, 2);
  Problem p = assemble_problem(x, Vector{1.0}, {Fraction(0.2), CorruptionKind::kTopkZeroing, 0, 0.1},
                               Vector{}, 2);
  Problem bad_y = p;
  bad_y.y[3] = std::nextafter(bad_y.y[3], 1e9);
  EXPECT_THROW(bad_y.check_invariants(), InvariantViolation);
  Problem bad_idx = p;
  bad_idx.corrupted_indices.pop_back();
  EXPECT_THROW(bad_idx.check_invariants(), InvariantViolation);
}

TEST(ProblemIo, RoundTripIsBitExact) {
  const DenseMatrix x = sample_gaussian_design(25, 3, 12);
  const Problem p = assemble_problem(x, sample_sparse_signal(3, 2, 1.7, 12),
                                     {Fraction(0.2), CorruptionKind::kTopkZeroing, 0, 0.1},
                                     gaussian_noise_with_l1(25, 0.3, 12), 12);
  const std::string dir = temp_dir("roundtrip");
  write_problem(dir, p);
  const Problem q = read_problem(dir);
  EXPECT_TRUE(q.x == p.x);
  EXPECT_EQ(q.y, p.y);
  EXPECT_EQ(q.w_star, p.w_star);
  EXPECT_EQ(q.zeta, p.zeta);
  EXPECT_EQ(q.d, p.d);
  EXPECT_EQ(q.corrupted_indices, p.corrupted_indices);
  EXPECT_EQ(q.seed, 12u);
  EXPECT_EQ(q.adversary_name, "topk_zeroing");
  EXPECT_DOUBLE_EQ(q.eta, 0.2);
  std::filesystem::remove_all(dir);
}

TEST(CorruptionNames, ParseRoundTrip) {
  for (auto k : {CorruptionKind::kNone, CorruptionKind::kTopkZeroing, CorruptionKind::kRandomSign,
                 CorruptionKind::kDenseAdversary}) {
    EXPECT_EQ(parse_corruption(corruption_name(k)), k);
  }
  EXPECT_THROW(parse_corruption("bogus"), std::invalid_argument);
}
