#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "ihsmm/lattice.hpp"
#include "ihsmm/params.hpp"
#include "ihsmm/sequence.hpp"

/// Exhaustive reference computations for tiny instances. Every function
/// enumerates segmentations explicitly (durations outermost, lexicographic,
/// then state labelings) and shares no code with the lattice recursions.
namespace ihsmm::oracle {

inline constexpr std::size_t kMaxPaths = 10'000'000;

/// Sum over all paths of pi * prod A * prod B (linear domain).
double brute_likelihood(const HsmmParams& params, const Sequence& seq,
                        InputView view = InputView::filled);
double brute_likelihood_is(const IsHsmmParams& params, const Sequence& seq);
/// Sum over all paths with the interval density at every gap crossing.
double brute_likelihood_ilp(const IlpParams& params, const Sequence& seq);

struct BestPath {
  std::vector<DecodedSegment> path;  // starts index the observed ticks
  double log_score = 0.0;
};

BestPath brute_best_path(const HsmmParams& params, const Sequence& seq,
                         InputView view = InputView::filled);
BestPath brute_best_path_ilp(const IlpParams& params, const Sequence& seq);

/// Expected counts under the path posterior, for one sequence.
struct BrutePosterior {
  Eigen::VectorXd initial;     // first super state
  Eigen::MatrixXd transition;  // super state pairs across boundaries
  Eigen::MatrixXd emission;    // M x N
};

BrutePosterior brute_posteriors(const HsmmParams& params, const Sequence& seq,
                                InputView view = InputView::filled);

/// Recomputes the log score of one explicit path.
double path_log_score(const HsmmParams& params, const Sequence& seq,
                      const std::vector<DecodedSegment>& path,
                      InputView view = InputView::filled);
double path_log_score_ilp(const IlpParams& params, const Sequence& seq,
                          const std::vector<DecodedSegment>& path);

}  // namespace ihsmm::oracle
