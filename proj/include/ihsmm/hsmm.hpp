#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "ihsmm/lattice.hpp"
#include "ihsmm/model.hpp"
#include "ihsmm/params.hpp"

namespace ihsmm::hsmm {

/// Random row-stochastic parameters, deterministic in seed.
HsmmParams init_params(std::size_t M, std::size_t N, std::size_t Dmax, std::uint64_t seed);

/// Segment view of baseline parameters: pi for the first segment, A across
/// every boundary whatever the gap.
class BaseModel : public SegmentModel {
 public:
  explicit BaseModel(const HsmmParams& params);

  std::size_t states() const override { return params_->M; }
  std::size_t max_duration() const override { return params_->Dmax; }
  double log_emission(std::size_t state, SymbolId symbol) const override {
    return log_b_(static_cast<Eigen::Index>(state), symbol);
  }
  const Eigen::VectorXd& initial(std::size_t) const override { return params_->pi; }
  const Eigen::MatrixXd& transition(std::size_t, Eigen::MatrixXd&) const override {
    return params_->A;
  }
  const Eigen::MatrixXd& log_transition(std::size_t, Eigen::MatrixXd&) const override {
    return log_a_;
  }

 protected:
  const HsmmParams* params_;
  Eigen::MatrixXd log_a_;
  Eigen::MatrixXd log_b_;
};

LatticeInput make_input(const Sequence& seq, InputView view);

/// Sum of per-tick log emissions of state j over window.
double emission_block(const HsmmParams& params, std::size_t j, std::span<const SymbolId> window);

Lattice forward(const HsmmParams& params, const Sequence& seq,
                InputView view = InputView::filled, LengthMode mode = LengthMode::clamp);
Lattice backward(const HsmmParams& params, const Sequence& seq,
                 InputView view = InputView::filled, LengthMode mode = LengthMode::clamp);
Lattice forward_backward(const HsmmParams& params, const Sequence& seq,
                         InputView view = InputView::filled,
                         LengthMode mode = LengthMode::clamp);
Decoding viterbi(const HsmmParams& params, const Sequence& seq,
                 InputView view = InputView::filled);

/// Expected sufficient statistics of a batch.
struct Counts {
  Eigen::VectorXd initial;
  Eigen::MatrixXd transition;
  Eigen::MatrixXd emission;
  double log_likelihood = 0.0;  // over sequences with a finite likelihood
  std::size_t impossible = 0;   // sequences with zero likelihood, skipped

  Counts(std::size_t super_states, std::size_t M, std::size_t N);
};

Counts expected_counts(const HsmmParams& params, std::span<const Sequence> batch,
                       std::span<const Lattice> lattices, InputView view);

/// Normalized expected counts plus kappa. Rows without any evidence keep
/// their previous values. Throws DegenerateLattice if no sequence of the
/// batch has a finite likelihood.
HsmmParams reestimate(const HsmmParams& params, std::span<const Sequence> batch,
                      std::span<const Lattice> lattices, double kappa,
                      InputView view = InputView::filled);
HsmmParams maximize(const HsmmParams& params, const Counts& counts, double kappa);

/// Batch log-likelihood; sequences with zero likelihood are excluded.
double log_likelihood(const HsmmParams& params, std::span<const Sequence> batch,
                      InputView view = InputView::filled,
                      LengthMode mode = LengthMode::clamp);

TrainedModel train(std::span<const Sequence> sequences, std::size_t N, std::size_t M,
                   std::size_t Dmax, const TrainConfig& config,
                   const IterationObserver& observer = {});

/// Expected number of state-to-state transitions (durations summed out).
Eigen::MatrixXd transition_occupancy(const HsmmParams& params, std::span<const Sequence> batch,
                                     InputView view = InputView::filled);

Sequence generate(const HsmmParams& params, std::size_t length, GenerateMode mode,
                  std::uint64_t seed);

/// Recognition over a bank of baseline models.
Recognition recognize(std::span<const TrainedModel> bank, const Sequence& seq);

}  // namespace ihsmm::hsmm
