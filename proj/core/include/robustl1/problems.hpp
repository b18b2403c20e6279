#pragma once

// Synthetic instances of y = X w* + ζ + d: Gaussian designs, sparse signals,
// sparse corruptions (including the top-magnitude zeroing adversary) and
// dense noise (including the small-magnitude zeroing adversary).

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "robustl1/analytics.hpp"
#include "robustl1/numerics.hpp"

namespace robustl1 {

using IndexSet = std::vector<std::size_t>;

enum class CorruptionKind { kNone, kTopkZeroing, kRandomSign, kDenseAdversary };

std::string_view corruption_name(CorruptionKind kind);
/// Accepts the names produced by corruption_name; throws on anything else.
CorruptionKind parse_corruption(std::string_view name);

struct CorruptionSpec {
  Fraction eta;
  CorruptionKind kind = CorruptionKind::kNone;
  double magnitude = 0.0;  // random_sign only
  double epsilon = 0.1;    // dense_adversary only
};

struct Corruption {
  Vector values;     // ζ (or d for the dense adversary)
  IndexSet indices;  // ascending; exactly the nonzero entries of `values`
};

class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct Problem {
  DenseMatrix x;
  Vector w_star;
  Vector zeta;
  Vector d;
  Vector y;
  IndexSet corrupted_indices;
  std::uint64_t seed = 0;
  std::string adversary_name = "none";
  double eta = 0.0;

  std::size_t rows() const { return x.rows(); }
  std::size_t cols() const { return x.cols(); }
  std::size_t sparsity() const;

  /// Throws InvariantViolation unless y reproduces X w* + ζ + d bit for bit,
  /// ζ vanishes off corrupted_indices and |corrupted_indices| = ‖ζ‖₀.
  void check_invariants() const;
};

DenseMatrix sample_gaussian_design(std::size_t m, std::size_t n, std::uint64_t seed);

/// k distinct uniformly chosen positions holding ±amplitude.
Vector sample_sparse_signal(std::size_t n, std::size_t k, double amplitude, std::uint64_t seed);

/// ζ = -(X w*) on the ⌊ηm⌋ entries of X w* largest in magnitude.
Corruption corrupt_topk_zeroing(const DenseMatrix& x, std::span<const double> w_star,
                                Fraction eta);

/// d = -(X w*) on the ⌊(1 - (η₀ + ε/2))m⌋ entries smallest in magnitude,
/// for 0 < ε < 0.2.
Corruption adversarial_dense_noise(const DenseMatrix& x, std::span<const double> w_star,
                                   double epsilon);

/// ⌊ηm⌋ uniformly random positions set to ±magnitude.
Corruption random_corruption(std::size_t m, Fraction eta, double magnitude, std::uint64_t seed);

/// Gaussian direction rescaled so that ‖d‖₁ equals `l1_norm_target`.
Vector gaussian_noise_with_l1(std::size_t m, double l1_norm_target, std::uint64_t seed);

using NoiseGenerator = std::function<Vector(std::size_t m, std::uint64_t seed)>;

/// Builds y = X w* + ζ + d and verifies the invariants. An empty
/// `dense_noise` means d = 0; the dense adversary supplies its own d.
Problem assemble_problem(DenseMatrix x, Vector w_star, const CorruptionSpec& spec,
                         Vector dense_noise, std::uint64_t seed);
Problem assemble_problem(DenseMatrix x, Vector w_star, const CorruptionSpec& spec,
                         const NoiseGenerator& noise, std::uint64_t seed);

/// Writes X.csv, wstar.csv, y.csv, zeta.csv, d.csv and manifest.txt into
/// `directory` (created if missing).
void write_problem(const std::string& directory, const Problem& problem);
Problem read_problem(const std::string& directory);

}  // namespace robustl1
