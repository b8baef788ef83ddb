#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "ihsmm/hsmm.hpp"

namespace ihsmm::is {

/// Base parameters identical to hsmm::init_params(M, N, Dmax, seed); the
/// interval tables start uniform.
IsHsmmParams init_params(std::size_t M, std::size_t N, std::size_t Dmax, std::size_t Dmax_int,
                         std::uint64_t seed);

/// Distribution over buckets 1..Dmax_int given that an interval follows,
/// from one row of the interval choice table (column 0 is "no interval").
/// Uniform when the row puts no mass on any bucket.
Eigen::VectorXd bucket_given_gap(const Eigen::VectorXd& choice_row);

/// Segment view over the observed ticks. The interval node absorbs every
/// interval stretch, so ordinary states never score an interval tick. A
/// boundary crossing an interval of bucket b scores the bucket given the
/// super state before it, then the bridge slice of b.
class BridgeModel : public hsmm::BaseModel {
 public:
  explicit BridgeModel(const IsHsmmParams& params);

  const Eigen::VectorXd& initial(std::size_t leading_gap) const override;
  const Eigen::MatrixXd& transition(std::size_t gap, Eigen::MatrixXd& scratch) const override;
  const Eigen::MatrixXd& log_transition(std::size_t gap, Eigen::MatrixXd& scratch) const override;

 private:
  const IsHsmmParams* is_;
  std::vector<Eigen::VectorXd> start_rows_;
  std::vector<Eigen::MatrixXd> bridge_;
  std::vector<Eigen::MatrixXd> log_bridge_;
};

Lattice forward_is(const IsHsmmParams& params, const Sequence& seq,
                   LengthMode mode = LengthMode::clamp);
Lattice backward_is(const IsHsmmParams& params, const Sequence& seq,
                    LengthMode mode = LengthMode::clamp);
Lattice forward_backward_is(const IsHsmmParams& params, const Sequence& seq,
                            LengthMode mode = LengthMode::clamp);

double log_likelihood(const IsHsmmParams& params, std::span<const Sequence> batch,
                      LengthMode mode = LengthMode::clamp);

/// One EM step: base A from gap-free boundaries, bridge rows from boundaries
/// that cross an interval. Rows without evidence keep their values.
IsHsmmParams reestimate(const IsHsmmParams& params, std::span<const Sequence> batch,
                        double kappa, double* log_likelihood = nullptr);

TrainedModel train_is(std::span<const Sequence> sequences, std::size_t N, std::size_t M,
                      std::size_t Dmax, const TrainConfig& config,
                      const IterationObserver& observer = {});

/// Expected ordinary-to-ordinary transitions, bridges included.
Eigen::MatrixXd transition_occupancy(const IsHsmmParams& params, std::span<const Sequence> batch);

Sequence generate(const IsHsmmParams& params, std::size_t length, GenerateMode mode,
                  std::uint64_t seed);

Recognition recognize_is(std::span<const TrainedModel> bank, const Sequence& seq);

}  // namespace ihsmm::is
