#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "ihsmm/ilp_hsmm.hpp"
#include "ihsmm/is_hsmm.hpp"
#include "ihsmm/params.hpp"
#include "ihsmm/random.hpp"
#include "ihsmm/sequence.hpp"

namespace testing {

/// Random sequence over symbols [first, first + n); interval ticks (id 0)
/// appear with probability p_interval.
inline ihsmm::Sequence random_sequence(ihsmm::Rng& rng, std::size_t T, std::size_t first, std::size_t n,
                                       double p_interval = 0.0) {
  ihsmm::Sequence s;
  for (std::size_t t = 0; t < T; ++t) {
    if (p_interval > 0.0 && rng.bernoulli(p_interval))
      s.obs.push_back(ihsmm::SymbolTable::kInterval);
    else
      s.obs.push_back(static_cast<ihsmm::SymbolId>(first + rng.index(n)));
  }
  return s;
}

/// Relative error; absolute when both magnitudes are below 1.
inline double rel_err(double a, double b) {
  if (a == b) return 0.0;
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

/// Interval tables start uniform; tests want them random.
inline void randomize_interval_tables(ihsmm::IsHsmmParams& p, ihsmm::Rng& rng) {
  const auto D = static_cast<Eigen::Index>(p.base.Dmax);
  auto fill = [&](Eigen::MatrixXd& m, Eigen::Index block) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = rng.uniform_open();
      if (block > 0) m.row(r).segment((r / block) * block, block).setZero();
      const double total = m.row(r).sum();
      if (total > 0.0) m.row(r) /= total;
    }
  };
  for (auto& b : p.bridge) fill(b, D);
  fill(p.bridge_start, 0);
  fill(p.gap_choice, 0);
  for (Eigen::Index c = 0; c < p.gap_choice_start.size(); ++c) p.gap_choice_start(c) = rng.uniform_open();
  p.gap_choice_start /= p.gap_choice_start.sum();
}

inline ihsmm::IsHsmmParams random_is(ihsmm::Rng& rng, std::size_t M, std::size_t N, std::size_t D,
                                     std::size_t G, std::uint64_t seed) {
  auto p = ihsmm::is::init_params(M, N, D, G, seed);
  randomize_interval_tables(p, rng);
  return p;
}

/// Random base with a random observed Gaussian on every pair.
inline ihsmm::IlpParams random_ilp(ihsmm::Rng& rng, std::size_t M, std::size_t N, std::size_t D,
                                   std::uint64_t seed) {
  auto p = ihsmm::ilp::init_params(M, N, D, seed, {2.0, 1.0}, 1e-4, 0.5, 0.5);
  for (auto& g : p.L) g = ihsmm::ilp::make_interval(rng.uniform() * 4.0, 0.5 + rng.uniform() * 1.5, p.delta_pt, true);
  return p;
}

}  // namespace testing
