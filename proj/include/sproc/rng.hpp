#pragma once

#include <cstdint>
#include <span>

namespace sproc {

/// SplitMix64 (Steele, Lea, Flood). All sampling in the toolkit draws from this
/// generator so that a seed fully determines every report.
///
///   state += 0x9E3779B97F4A7C15
///   z = state
///   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
///   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
///   return z ^ (z >> 31)
///
/// uniform() maps the top 53 bits to [0, 1).
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next() noexcept {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound) noexcept { return next() % bound; }

  /// Standard normal via Box-Muller (one value per call).
  double normal() noexcept;

  void fill_box(std::span<double> x, double radius) noexcept {
    for (double& v : x) v = uniform(-radius, radius);
  }

 private:
  std::uint64_t state_;
};

/// Derives an independent stream seed from a base seed and a stage tag.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) noexcept;

}  // namespace sproc
