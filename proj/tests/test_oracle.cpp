#include <doctest.h>

#include <cmath>

#include "ihsmm/errors.hpp"
#include "ihsmm/hsmm.hpp"
#include "ihsmm/is_hsmm.hpp"
#include "ihsmm/logmath.hpp"
#include "ihsmm/oracle.hpp"
#include "support.hpp"

using namespace ihsmm;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

/// Single admissible path on (0,0,1): state 0 for two ticks, then state 1.
HsmmParams one_path() {
  HsmmParams p;
  p.M = 2;
  p.N = 2;
  p.Dmax = 2;
  p.pi = VectorXd::Zero(4);
  p.pi(p.index(0, 2)) = 0.7;
  p.pi(p.index(1, 1)) = 0.3;
  p.A = MatrixXd::Zero(4, 4);
  for (std::size_t d = 1; d <= 2; ++d) {
    p.A(p.index(0, d), p.index(1, 1)) = 0.4;
    p.A(p.index(0, d), p.index(1, 2)) = 0.6;
    p.A(p.index(1, d), p.index(0, 1)) = 0.5;
    p.A(p.index(1, d), p.index(0, 2)) = 0.5;
  }
  p.B = MatrixXd::Identity(2, 2);
  return p;
}

Sequence seq_of(std::initializer_list<SymbolId> ids) { return Sequence{std::nullopt, ids}; }

}  // namespace

TEST_CASE("single-path likelihood is the product of its factors") {
  const HsmmParams p = one_path();
  const Sequence s = seq_of({0, 0, 1});
  CHECK(oracle::brute_likelihood(p, s) == doctest::Approx(0.7 * 0.4));
  const auto best = oracle::brute_best_path(p, s);
  CHECK(best.path == std::vector<DecodedSegment>{{0, 2, 0}, {1, 1, 2}});
  CHECK(best.log_score == doctest::Approx(std::log(0.28)));
  CHECK(oracle::path_log_score(p, s, best.path) == doctest::Approx(best.log_score));
}

TEST_CASE("impossible sequence has probability zero") {
  const HsmmParams p = one_path();
  const Sequence s = seq_of({1, 1, 1});
  CHECK(oracle::brute_likelihood(p, s) == 0.0);
  CHECK(oracle::brute_best_path(p, s).log_score == kNegInf);
}

TEST_CASE("empty state space is rejected") {
  HsmmParams p;
  p.N = 2;
  p.pi = VectorXd::Zero(0);
  p.A = MatrixXd::Zero(0, 0);
  p.B = MatrixXd::Zero(0, 2);
  try {
    (void)oracle::brute_likelihood(p, seq_of({0}));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidDims);
  }
}

TEST_CASE("enumeration refuses oversized instances") {
  const auto p = hsmm::init_params(3, 2, 8, 1);
  Sequence s;
  s.obs.assign(40, 0);
  try {
    (void)oracle::brute_likelihood(p, s);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TooLarge);
  }
}

TEST_CASE("best path never exceeds the likelihood and rescoring agrees") {
  Rng rng(77);
  for (std::uint64_t n = 0; n < 100; ++n) {
    const std::size_t M = 1 + rng.index(3), N = 1 + rng.index(3), D = 1 + rng.index(3);
    const auto p = hsmm::init_params(M, N, D, 4000 + n);
    const Sequence s = testing::random_sequence(rng, 1 + rng.index(8), 0, N);
    const auto best = oracle::brute_best_path(p, s);
    CHECK(best.log_score <= std::log(oracle::brute_likelihood(p, s)) + 1e-12);
    if (best.log_score != kNegInf)
      CHECK(oracle::path_log_score(p, s, best.path) == doctest::Approx(best.log_score).epsilon(1e-12));

    const auto q = testing::random_ilp(rng, M, N + 1, D, 5000 + n);
    const Sequence t = testing::random_sequence(rng, 1 + rng.index(8), 1, N, 0.3);
    const auto best_ilp = oracle::brute_best_path_ilp(q, t);
    if (best_ilp.log_score == kNegInf) continue;
    CHECK(oracle::path_log_score_ilp(q, t, best_ilp.path) == doctest::Approx(best_ilp.log_score).epsilon(1e-12));
  }
}

TEST_CASE("interval-state oracle on a single bridge") {
  // "a i b": state 0 then the bridge into state 1 over a one-tick gap
  auto p = is::init_params(2, 3, 1, 2, 0);
  p.base.pi << 1.0, 0.0;
  p.base.B << 0.0, 1.0, 0.0, 0.0, 0.0, 1.0;
  p.bridge[0] << 0.0, 1.0, 1.0, 0.0;
  p.gap_choice << 0.5, 0.3, 0.2, 0.5, 0.3, 0.2;
  const double given = 0.3 / 0.5;
  CHECK(oracle::brute_likelihood_is(p, seq_of({1, 0, 2})) == doctest::Approx(given));
  CHECK(oracle::brute_likelihood_is(p, seq_of({1, 1})) == 0.0);
}
