#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ihsmm/hsmm.hpp"

namespace ihsmm::ilp {

/// Support of a Gaussian where its density is at least delta_pt.
IntervalGaussian make_interval(double mu, double sigma, double delta_pt, bool observed);

double gaussian_pdf(double x, double mu, double sigma);

/// Smallest density over the integer gap lengths inside any pair's support,
/// times c: the value given to gaps outside a pair's support.
double out_of_range_density(const IlpParams& params);

/// Density of gap length l under g: the Gaussian inside [lo, hi], the
/// out-of-range density of params elsewhere.
double interval_pdf(const IntervalGaussian& g, double l, const IlpParams& params);

/// A gap of length gap between a run assigned to state from and the next
/// run assigned to state to.
struct GapObservation {
  std::size_t from;
  std::size_t to;
  std::size_t gap;
};

struct IntervalPrior {
  double mu = 0.0;
  double sigma = 0.5;
};

/// Uninformative entry for pairs never observed: mean of the corpus gaps,
/// three times their standard deviation.
IntervalPrior interval_prior(std::span<const std::size_t> gaps, double sigma_min);

/// Per-pair sample mean and (n - 1) standard deviation floored at
/// sigma_min; unobserved pairs get the prior.
std::vector<IntervalGaussian> fit_interval_stats(std::span<const GapObservation> observations,
                                                 std::size_t M, const IntervalPrior& prior,
                                                 double delta_pt, double sigma_min);

/// Gap observations along decoded paths: one per positive internal gap.
std::vector<GapObservation> gap_observations(std::span<const LatticeInput> inputs,
                                             std::span<const Decoding> paths);

/// Base HSMM over the observed ticks with the interval density multiplied
/// into every boundary that crosses a positive gap.
class IntervalModel : public hsmm::BaseModel {
 public:
  explicit IntervalModel(const IlpParams& params);

  const Eigen::MatrixXd& transition(std::size_t gap, Eigen::MatrixXd& scratch) const override;
  const Eigen::MatrixXd& log_transition(std::size_t gap, Eigen::MatrixXd& scratch) const override;

  double density(std::size_t i, std::size_t j, std::size_t gap) const;

 private:
  const IlpParams* ilp_;
  double out_of_range_;
};

IlpParams init_params(std::size_t M, std::size_t N, std::size_t Dmax, std::uint64_t seed,
                      const IntervalPrior& prior, double delta_pt, double c, double sigma_min);

Decoding viterbi_ilp(const IlpParams& params, const Sequence& seq,
                     LengthMode mode = LengthMode::clamp);
/// Sum over all paths with interval factors.
Lattice forward_ilp(const IlpParams& params, const Sequence& seq,
                    LengthMode mode = LengthMode::clamp);

double score(const IlpParams& params, const Sequence& seq, IlpScore criterion,
             LengthMode mode = LengthMode::clamp);

/// Sum-forward objective over a batch (the training criterion).
double log_likelihood(const IlpParams& params, std::span<const Sequence> batch,
                      LengthMode mode = LengthMode::clamp);

TrainedModel train_ilp(std::span<const Sequence> sequences, std::size_t N, std::size_t M,
                       std::size_t Dmax, const TrainConfig& config,
                       const IterationObserver& observer = {});

Sequence generate(const IlpParams& params, std::size_t length, GenerateMode mode,
                  std::uint64_t seed);

/// Scores with the criterion stored in each model (best path by default).
Recognition recognize_ilp(std::span<const TrainedModel> bank, const Sequence& seq);

}  // namespace ihsmm::ilp
