#pragma once

#include <cmath>
#include <optional>
#include <utility>
#include <vector>
#include <span>

#include <Eigen/Dense>

#include "ihsmm/errors.hpp"
#include "ihsmm/lattice.hpp"
#include "ihsmm/model.hpp"
#include "ihsmm/params.hpp"
#include "ihsmm/random.hpp"
#include "ihsmm/sequence.hpp"

namespace ihsmm::detail {

/// counts + kappa, zeroed on [skip, skip + skip_len), normalized. Empty when
/// counts carry no mass at all.
std::optional<Eigen::VectorXd> normalize_counts(const Eigen::VectorXd& counts, double kappa,
                                                Eigen::Index skip = 0, Eigen::Index skip_len = 0);

/// Replaces each row of dst that has evidence in counts; other rows stay.
/// Entries of the row's own state block are kept at zero when block > 0.
void update_rows(Eigen::MatrixXd& dst, const Eigen::MatrixXd& counts, double kappa,
                 Eigen::Index block = 0);

/// Random strictly positive row-stochastic matrix; with block > 0 the
/// row's own block of that width is zero.
Eigen::MatrixXd random_rows(Rng& rng, Eigen::Index rows, Eigen::Index cols, Eigen::Index block = 0);
/// Same support as random_rows, every row uniform.
Eigen::MatrixXd uniform_rows(Eigen::Index rows, Eigen::Index cols, Eigen::Index block = 0);
Eigen::VectorXd random_distribution(Rng& rng, Eigen::Index size);

/// Lowest index of the largest entry.
Eigen::Index argmax(std::span<const double> values);
Eigen::Index argmax(const Eigen::VectorXd& values);
Eigen::Index argmax_row(const Eigen::MatrixXd& m, Eigen::Index row);

/// Throws EmptySequence or UnknownSymbol unless seq fits an alphabet of N.
void check_symbols(const Sequence& seq, std::size_t N);
/// Throws LengthExceeded in strict mode when the input cannot be covered.
void check_length(const SegmentModel& model, const LatticeInput& in, LengthMode mode);

struct EmResult {
  double log_likelihood = 0.0;
  std::size_t iterations = 0;
  std::vector<double> history;
};

/// estep(params) -> {stats, log_likelihood}; mstep(params, stats) -> params.
/// Stops when the gain drops below epsilon or after max_iters steps.
template <class Params, class EStep, class MStep>
EmResult run_em(Params& params, EStep&& estep, MStep&& mstep, const TrainConfig& config,
                const IterationObserver& observer) {
  EmResult res;
  auto [stats, theta] = estep(params);
  if (!std::isfinite(theta))
    throw Error(ErrorCode::DegenerateLattice, "every training sequence has zero likelihood");
  res.history.push_back(theta);
  for (std::size_t h = 1; h <= config.max_iters; ++h) {
    params = mstep(params, stats);
    auto [next_stats, next_theta] = estep(params);
    if (!std::isfinite(next_theta))
      throw Error(ErrorCode::DegenerateLattice, "every training sequence has zero likelihood");
    const double delta = next_theta - theta;
    stats = std::move(next_stats);
    theta = next_theta;
    res.history.push_back(theta);
    res.iterations = h;
    if (observer) {
      const ModelParams snapshot = params;
      observer(IterationInfo{h, theta, delta, snapshot});
    }
    if (delta < config.epsilon) break;
  }
  res.log_likelihood = theta;
  return res;
}

}  // namespace ihsmm::detail
