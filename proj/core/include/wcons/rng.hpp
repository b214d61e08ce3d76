#pragma once

// Portable seeded random streams. The bit generator is xoshiro256** seeded
// through SplitMix64; all derived variates (uniform, normal, gamma, beta)
// are computed here rather than by <random> distributions so that a seed
// produces the same stream on every platform and standard library.

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace wcons {

/// SplitMix64 finalizer.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Sub-seed for stream `index` of `seed`: splitmix64(seed ^ splitmix64(index + 1)).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept;

class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) noexcept;

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next_u64() noexcept;

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;
  /// Uniform on (0, 1).
  double uniform_open() noexcept;
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, n), n > 0 (Lemire's rejection method).
  std::size_t uniform_index(std::size_t n) noexcept;

  /// Standard normal via Box-Muller; the second variate of each pair is cached.
  double normal() noexcept;
  double normal(double mean, double sd) noexcept { return mean + sd * normal(); }

  /// Gamma(shape, 1) by Marsaglia-Tsang; shape < 1 is boosted by U^(1/shape).
  double gamma(double shape) noexcept;
  /// Beta(a, b) as X / (X + Y) with X ~ Gamma(a), Y ~ Gamma(b).
  double beta(double a, double b) noexcept;

  bool bernoulli(double p) noexcept { return uniform() < p; }

  /// k distinct indices from [0, n) in draw order (partial Fisher-Yates).
  std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k);

  /// Independent child stream.
  Rng split(std::uint64_t index) const noexcept { return Rng(derive_seed(seed_, index)); }

 private:
  std::uint64_t seed_;
  std::array<std::uint64_t, 4> s_{};
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace wcons
