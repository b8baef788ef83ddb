#include "ihsmm/random.hpp"

#include <cmath>
#include <numbers>

namespace ihsmm {

double Rng::normal(double mu, double sigma) {
  // Box-Muller, one value per call.
  const double u1 = uniform_open();
  const double u2 = uniform();
  return mu + sigma * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::size_t Rng::categorical(std::span<const double> weights) {
  double total = 0.0;
  std::size_t last = 0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (weights[k] > 0.0) {
      total += weights[k];
      last = k;
    }
  }
  if (total <= 0.0) return 0;
  double u = uniform() * total;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (weights[k] <= 0.0) continue;
    if (u < weights[k]) return k;
    u -= weights[k];
  }
  return last;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) {
  // splitmix64 finalizer over the combined value
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace ihsmm
