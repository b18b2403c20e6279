#pragma once

// Counter-based random numbers: every draw is a pure function of
// (seed, stream, counter), so generation order and threading never change
// the values.

#include <cstdint>
#include <string_view>

namespace robustl1 {

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Folds a label into a seed, e.g. to derive per-experiment streams.
std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t value);
std::uint64_t hash_label(std::uint64_t seed, std::string_view label);

class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream) : key_(hash_combine(seed, stream)) {}

  std::uint64_t bits(std::uint64_t counter) const;
  /// Uniform in the open interval (0, 1).
  double uniform(std::uint64_t counter) const;
  /// Standard normal via Box–Muller on the pair (2⌊c/2⌋, 2⌊c/2⌋+1); even
  /// counters take the cosine branch, odd ones the sine branch.
  double normal(std::uint64_t counter) const;
  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t counter, std::uint64_t bound) const;

 private:
  std::uint64_t key_;
};

// Stream identifiers, one per kind of randomness in a problem instance.
enum class Stream : std::uint64_t {
  kDesign = 1,
  kSignalSupport = 2,
  kSignalSign = 3,
  kCorruption = 4,
  kNoise = 5,
  kDirection = 6,
  kSolver = 7,
};

inline CounterRng make_rng(std::uint64_t seed, Stream stream) {
  return CounterRng(seed, static_cast<std::uint64_t>(stream));
}

}  // namespace robustl1
