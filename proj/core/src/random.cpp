#include "robustl1/random.hpp"

#include <cmath>

namespace robustl1 {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t value) {
  return mix64(mix64(seed) ^ (value + 0x632be59bd9b4e019ULL));
}

std::uint64_t hash_label(std::uint64_t seed, std::string_view label) {
  // FNV-1a over the label, then mixed with the seed.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : label) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return hash_combine(seed, h);
}

std::uint64_t CounterRng::bits(std::uint64_t counter) const {
  return mix64(key_ ^ mix64(counter));
}

double CounterRng::uniform(std::uint64_t counter) const {
  // 53 random bits, shifted by half an ulp to stay inside (0, 1).
  return (static_cast<double>(bits(counter) >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::normal(std::uint64_t counter) const {
  constexpr double kTwoPi = 6.283185307179586476925;
  const std::uint64_t base = counter & ~std::uint64_t{1};
  const double radius = std::sqrt(-2.0 * std::log(uniform(base)));
  const double angle = kTwoPi * uniform(base + 1);
  return (counter & 1) ? radius * std::sin(angle) : radius * std::cos(angle);
}

std::uint64_t CounterRng::below(std::uint64_t counter, std::uint64_t bound) const {
  const auto value = static_cast<std::uint64_t>(uniform(counter) * static_cast<double>(bound));
  return value < bound ? value : bound - 1;
}

}  // namespace robustl1
