#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>

namespace ihsmm {

/// Seeded generator with platform-independent draws. The standard
/// distributions are implementation-defined, so the mapping from engine
/// output to values is done here to keep datasets and models byte-stable.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  /// Uniform on (0, 1].
  double uniform_open() { return 1.0 - uniform(); }
  /// Uniform integer on [0, n); n must be positive.
  std::size_t index(std::size_t n) {
    return static_cast<std::size_t>(uniform() * static_cast<double>(n));
  }
  /// Uniform integer on [lo, hi].
  std::size_t between(std::size_t lo, std::size_t hi) { return lo + index(hi - lo + 1); }
  bool bernoulli(double p) { return uniform() < p; }
  double normal(double mu, double sigma);
  /// Draws an index with probability proportional to weights (non-negative,
  /// not all zero). Falls back to the last positive weight on rounding.
  std::size_t categorical(std::span<const double> weights);

 private:
  std::mt19937_64 engine_;
};

/// Derives an independent stream seed from a base seed and a salt.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt);

}  // namespace ihsmm
