#include <doctest.h>

#include <algorithm>
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

constexpr SymbolId I = SymbolTable::kInterval;

Sequence seq_of(std::initializer_list<SymbolId> ids) { return Sequence{std::nullopt, ids}; }

/// Symbols: 0 interval, 1 "a", 2 "b". State 0 emits a or b, state 1 only b.
IsHsmmParams toy() {
  IsHsmmParams p = is::init_params(2, 3, 1, 1, 0);
  p.base.pi << 0.6, 0.4;
  p.base.B << 0.0, 0.7, 0.3, 0.0, 0.0, 1.0;
  p.bridge[0] << 0.0, 1.0, 1.0, 0.0;
  return p;
}

TrainedModel as_model(std::string label, ModelParams params) {
  TrainedModel m;
  m.label = std::move(label);
  m.params = std::move(params);
  return m;
}

std::vector<Sequence> interval_free_corpus(std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Sequence> out;
  for (int k = 0; k < 4; ++k) out.push_back(testing::random_sequence(rng, 6 + rng.index(6), 1, 3));
  return out;
}

}  // namespace

TEST_CASE("init_params keeps the baseline draw and stochastic bridges") {
  const auto p = is::init_params(3, 4, 2, 4, 9);
  const auto base = hsmm::init_params(3, 4, 2, 9);
  CHECK(p.base.A == base.A);
  CHECK(p.base.B == base.B);
  CHECK(p.base.pi == base.pi);
  CHECK(p.bridge.size() == 4);
  CHECK_NOTHROW(p.validate());
  CHECK(p.bucket(1) == 1);
  CHECK(p.bucket(4) == 4);
  CHECK(p.bucket(40) == 4);
}

TEST_CASE("forward_is reduces to the baseline on interval-free input") {
  Rng rng(3);
  for (std::uint64_t n = 0; n < 50; ++n) {
    const auto p = is::init_params(1 + rng.index(3), 4, 1 + rng.index(3), 3, n);
    const Sequence s = testing::random_sequence(rng, 1 + rng.index(12), 1, 3);
    CHECK(is::forward_is(p, s).log_likelihood == hsmm::forward(p.base, s).log_likelihood);
  }
}

TEST_CASE("forward_is on a single bridged path") {
  const auto p = toy();
  CHECK(is::forward_is(p, seq_of({1, I, 2})).log_likelihood ==
        doctest::Approx(std::log(0.6 * 0.7 * 1.0 * 1.0)).epsilon(1e-12));
  CHECK(std::exp(is::forward_is(p, seq_of({1, I, 2})).log_likelihood) ==
        doctest::Approx(oracle::brute_likelihood_is(p, seq_of({1, I, 2}))).epsilon(1e-12));
}

TEST_CASE("forward_is matches the oracle on random small instances") {
  Rng rng(77);
  for (std::uint64_t n = 0; n < 100; ++n) {
    const std::size_t M = 1 + rng.index(3), N = 2 + rng.index(2), D = 1 + rng.index(3);
    auto p = is::init_params(M, N, D, 1 + rng.index(3), 500 + n);
    testing::randomize_interval_tables(p, rng);
    const Sequence s = testing::random_sequence(rng, 1 + rng.index(8), 1, N - 1, 0.3);
    const double fwd = is::forward_is(p, s).log_likelihood;
    const double brute = std::log(oracle::brute_likelihood_is(p, s));
    INFO("instance " << n);
    CHECK(testing::rel_err(fwd, brute) < 1e-9);
  }
}

TEST_CASE("backward_is base case and coverage identity") {
  const auto p = is::init_params(2, 3, 2, 3, 4);
  CHECK((is::backward_is(p, seq_of({1})).beta.back().array() == 0.0).all());
  CHECK(is::backward_is(p, seq_of({1, 2, 1})).log_likelihood == hsmm::backward(p.base, seq_of({1, 2, 1})).log_likelihood);

  Rng rng(8);
  for (int trial = 0; trial < 30; ++trial) {
    auto q = is::init_params(1 + rng.index(3), 3, 1 + rng.index(3), 1 + rng.index(4), 40 + trial);
    testing::randomize_interval_tables(q, rng);
    const Sequence s = testing::random_sequence(rng, 1 + rng.index(16), 1, 2, 0.3);
    const auto lat = is::forward_backward_is(q, s);
    if (!std::isfinite(lat.log_likelihood)) continue;
    is::BridgeModel model(q);
    for (double v : coverage_log_mass(model, stripped_input(s), lat))
      CHECK(testing::rel_err(v, lat.log_likelihood) < 1e-9);
  }
}

TEST_CASE("leading intervals use the start bridge") {
  auto p = toy();
  p.bridge_start.row(0) << 0.25, 0.75;
  CHECK(is::forward_is(p, seq_of({I, I, 2})).log_likelihood ==
        doctest::Approx(std::log(0.25 * 0.3 + 0.75 * 1.0)).epsilon(1e-12));
  // a trailing interval adds nothing
  CHECK(is::forward_is(p, seq_of({1, I})).log_likelihood == doctest::Approx(std::log(0.6 * 0.7)).epsilon(1e-12));
}

TEST_CASE("an interval scores its bucket given that a gap occurs") {
  IsHsmmParams p = is::init_params(2, 3, 1, 3, 0);
  p.base.pi << 1.0, 0.0;
  p.base.B << 0.0, 1.0, 0.0, 0.0, 0.0, 1.0;
  for (auto& slice : p.bridge) slice << 0.0, 1.0, 1.0, 0.0;
  p.gap_choice.row(0) << 0.5, 0.1, 0.3, 0.1;
  CHECK(is::forward_is(p, seq_of({1, I, I, 2})).log_likelihood == doctest::Approx(std::log(0.6)).epsilon(1e-12));
  CHECK(is::forward_is(p, seq_of({1, I, I, I, I, 2})).log_likelihood == doctest::Approx(std::log(0.2)).epsilon(1e-12));
  // gap-free boundaries take no factor
  CHECK(is::forward_is(p, seq_of({1, 2})).log_likelihood == hsmm::forward(p.base, seq_of({1, 2})).log_likelihood);
  const VectorXd given = is::bucket_given_gap(p.gap_choice.row(0).transpose());
  CHECK(given(1) == doctest::Approx(0.6));
  CHECK(is::bucket_given_gap(VectorXd::Unit(4, 0)).isApproxToConstant(1.0 / 3.0));
}

TEST_CASE("reestimate keeps every table stochastic") {
  Rng rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    auto p = is::init_params(1 + rng.index(3), 4, 1 + rng.index(3), 1 + rng.index(3), 70 + trial);
    testing::randomize_interval_tables(p, rng);
    std::vector<Sequence> batch;
    for (int k = 0; k < 3; ++k) batch.push_back(testing::random_sequence(rng, 3 + rng.index(10), 1, 3, 0.25));
    double ll = 0.0;
    try {
      const auto q = is::reestimate(p, batch, 1e-6, &ll);
      CHECK_NOTHROW(q.validate(1e-9));
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::DegenerateLattice);
    }
  }
}

TEST_CASE("interval-free training matches the baseline") {
  const auto data = interval_free_corpus(5);
  TrainConfig cfg;
  cfg.seed = 21;
  cfg.max_iters = 30;
  const auto is_model = is::train_is(data, 4, 3, 2, cfg);
  const auto base_model = hsmm::train(data, 4, 3, 2, cfg);
  const auto& pi = std::get<IsHsmmParams>(is_model.params);
  const auto& pb = std::get<HsmmParams>(base_model.params);
  CHECK(is_model.iterations == base_model.iterations);
  CHECK((pi.base.A - pb.A).cwiseAbs().maxCoeff() <= 1e-9);
  CHECK((pi.base.B - pb.B).cwiseAbs().maxCoeff() <= 1e-9);
  CHECK((pi.base.pi - pb.pi).cwiseAbs().maxCoeff() <= 1e-9);
  const auto init = is::init_params(3, 4, 2, cfg.max_interval, cfg.seed);
  for (std::size_t b = 0; b < init.bridge.size(); ++b) CHECK(pi.bridge[b] == init.bridge[b]);
  CHECK(pi.bridge_start == init.bridge_start);
}

TEST_CASE("training is monotone and deterministic") {
  Rng rng(14);
  std::vector<Sequence> data;
  for (int k = 0; k < 4; ++k) data.push_back(testing::random_sequence(rng, 10, 1, 3, 0.3));
  TrainConfig cfg;
  cfg.seed = 2;
  cfg.max_interval = 3;
  const auto a = is::train_is(data, 4, 2, 3, cfg);
  const auto b = is::train_is(data, 4, 2, 3, cfg);
  for (std::size_t h = 1; h < a.history.size(); ++h) CHECK(a.history[h] >= a.history[h - 1] - 1e-8);
  CHECK(a.history == b.history);
  CHECK(std::get<IsHsmmParams>(a.params).bridge == std::get<IsHsmmParams>(b.params).bridge);
}

TEST_CASE("recognition follows the bridge") {
  // two models that differ only in which state follows state 0 after a long interval
  IsHsmmParams near = is::init_params(3, 4, 1, 3, 0);
  near.base.pi << 1.0, 0.0, 0.0;
  near.base.B << 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1;
  near.base.A << 0, 0.5, 0.5, 0.5, 0, 0.5, 0.5, 0.5, 0;
  for (auto& slice : near.bridge) slice = near.base.A;
  IsHsmmParams far = near;
  near.bridge[2].row(0) << 0, 0.9, 0.1;
  far.bridge[2].row(0) << 0, 0.1, 0.9;

  const Sequence query = seq_of({1, I, I, I, I, 2});
  std::vector<TrainedModel> bank{as_model("far", far), as_model("near", near)};
  CHECK(is::recognize_is(bank, query).label == "near");
  std::reverse(bank.begin(), bank.end());
  CHECK(is::recognize_is(bank, query).label == "near");
  CHECK(std::log(oracle::brute_likelihood_is(near, query)) > std::log(oracle::brute_likelihood_is(far, query)));
  // a short interval reaches a bucket where both models agree
  const auto r = is::recognize_is(bank, seq_of({1, I, 2}));
  CHECK(r.scores[0] == r.scores[1]);
  CHECK(r.label == "far");

  std::vector<TrainedModel> single{as_model("only", far)};
  CHECK(is::recognize_is(single, query).label == "only");
  std::vector<TrainedModel> mixed{as_model("x", near.base)};
  CHECK_THROWS_AS(is::recognize_is(mixed, query), Error);
}

TEST_CASE("bridged counts recover the interval-stripped transition counts") {
  // cyclic a -> b -> c with intervals sprinkled between runs
  const HsmmParams truth = [] {
    HsmmParams p = hsmm::init_params(3, 4, 2, 0);
    p.pi.setZero();
    p.pi(p.index(0, 2)) = 1.0;
    p.A.setZero();
    for (std::size_t j = 0; j < 3; ++j)
      for (std::size_t d = 1; d <= 2; ++d) {
        const std::size_t next = (j + 1) % 3;
        p.A(p.index(j, d), p.index(next, 1)) = 0.5;
        p.A(p.index(j, d), p.index(next, 2)) = 0.5;
      }
    p.B << 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1;
    return p;
  }();
  std::vector<Sequence> filled, stripped;
  Rng rng(4);
  for (std::uint64_t n = 0; n < 12; ++n) {
    const Sequence plain = hsmm::generate(truth, 14, GenerateMode::sampled, n);
    Sequence with_gaps;
    for (std::size_t t = 0; t < plain.obs.size(); ++t) {
      if (t > 0 && plain.obs[t] != plain.obs[t - 1] && rng.bernoulli(0.5))
        for (std::size_t g = 0, len = 1 + rng.index(4); g < len; ++g) with_gaps.obs.push_back(I);
      with_gaps.obs.push_back(plain.obs[t]);
    }
    filled.push_back(with_gaps);
    stripped.push_back(plain);
  }
  TrainConfig cfg;
  cfg.seed = 1;
  cfg.max_interval = 4;
  cfg.max_iters = 200;
  const auto is_model = is::train_is(filled, 4, 3, 2, cfg);
  const auto base_model = hsmm::train(stripped, 4, 3, 2, cfg);
  // states are compared through the symbol each one emits
  auto by_symbol = [](const MatrixXd& occ, const HsmmParams& p) {
    MatrixXd out = MatrixXd::Zero(4, 4);
    for (Eigen::Index i = 0; i < occ.rows(); ++i)
      for (Eigen::Index j = 0; j < occ.cols(); ++j) {
        Eigen::Index si = 0, sj = 0;
        p.B.row(i).maxCoeff(&si);
        p.B.row(j).maxCoeff(&sj);
        out(si, sj) += occ(i, j);
      }
    return out;
  };
  const auto& pis = std::get<IsHsmmParams>(is_model.params);
  const auto& pbase = std::get<HsmmParams>(base_model.params);
  const MatrixXd a = by_symbol(is::transition_occupancy(pis, filled), pis.base);
  const MatrixXd b = by_symbol(hsmm::transition_occupancy(pbase, stripped), pbase);
  const double na = a.sum(), nb = b.sum();
  REQUIRE(nb > 0.0);
  CHECK(((a / na) - (b / nb)).cwiseAbs().maxCoeff() <= 0.05);
}

TEST_CASE("generation never emits an interval inside a run") {
  const auto p = is::init_params(3, 4, 3, 3, 6);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Sequence s = is::generate(p, 40, GenerateMode::sampled, seed);
    CHECK(s.obs.size() == 40);
    CHECK(is::generate(p, 40, GenerateMode::sampled, seed).obs == s.obs);
  }
  CHECK(is::generate(p, 25, GenerateMode::most_likely, 0).obs == is::generate(p, 25, GenerateMode::most_likely, 9).obs);
}
