#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "ihsmm/sequence.hpp"

namespace ihsmm {

/// The ticks a model emits, plus the interval ticks preceding each of them.
/// A segment may not straddle a positive gap.
struct LatticeInput {
  std::vector<SymbolId> obs;
  std::vector<std::size_t> gap_before;  // gap_before[0] is the leading gap
  std::size_t trailing_gap = 0;

  std::size_t length() const { return obs.size(); }
  std::size_t leading_gap() const { return gap_before.empty() ? trailing_gap : gap_before[0]; }
  /// Lengths of the gap-free blocks, in order.
  std::vector<std::size_t> block_lengths() const;
};

/// Every tick emitted, interval ticks included; no gaps.
LatticeInput filled_input(const Sequence& seq);
/// Interval ticks removed and recorded as gaps.
LatticeInput stripped_input(const Sequence& seq);

/// What the segmental recursions need from a parameter set. Super states are
/// flattened as state * max_duration() + (duration - 1).
class SegmentModel {
 public:
  virtual ~SegmentModel() = default;
  virtual std::size_t states() const = 0;
  virtual std::size_t max_duration() const = 0;
  virtual double log_emission(std::size_t state, SymbolId symbol) const = 0;
  /// Weights of the first super state after a leading gap (0 if none).
  virtual const Eigen::VectorXd& initial(std::size_t leading_gap) const = 0;
  /// Weights across a segment boundary separated by gap interval ticks.
  /// Implementations may build the matrix in scratch and return it.
  virtual const Eigen::MatrixXd& transition(std::size_t gap, Eigen::MatrixXd& scratch) const = 0;
  virtual const Eigen::MatrixXd& log_transition(std::size_t gap, Eigen::MatrixXd& scratch) const;

  std::size_t super_states() const { return states() * max_duration(); }
};

/// Log-domain forward/backward variables kept at segment right edges:
/// alpha[e](k) covers every path whose segment in super state k ends just
/// before tick e; beta[e](k) the continuation from there. e runs 0..T.
struct Lattice {
  std::vector<Eigen::VectorXd> alpha;
  std::vector<Eigen::VectorXd> beta;
  double log_likelihood = 0.0;
};

/// Log emission of a whole segment: seg[e](k) for the segment of super state
/// k ending before tick e; -inf when it would start before 0 or straddle a gap.
std::vector<Eigen::VectorXd> segment_scores(const SegmentModel& model, const LatticeInput& in);

/// False when some gap-free block cannot be covered by any state path
/// (a single state and a block longer than the maximum duration).
bool coverable(const SegmentModel& model, const LatticeInput& in);

Lattice forward(const SegmentModel& model, const LatticeInput& in);
Lattice forward_backward(const SegmentModel& model, const LatticeInput& in);

/// For every tick, the log of the summed alpha*beta mass of all segments
/// covering it. Each entry equals the log-likelihood.
std::vector<double> coverage_log_mass(const SegmentModel& model, const LatticeInput& in,
                                      const Lattice& lattice);

/// Receives posterior expectations from accumulate_posteriors.
class PosteriorSink {
 public:
  virtual ~PosteriorSink() = default;
  /// Posterior of the first super state.
  virtual void initial(std::size_t leading_gap, const Eigen::VectorXd& posterior) = 0;
  /// Posterior of each (from, to) super-state pair across one boundary.
  virtual void transition(std::size_t gap, const Eigen::MatrixXd& posterior) = 0;
};

/// Adds the expected emission counts of one sequence to emission (M x N)
/// and reports initial and transition posteriors to sink. The lattice must
/// come from forward_backward and have finite likelihood.
void accumulate_posteriors(const SegmentModel& model, const LatticeInput& in,
                           const Lattice& lattice, Eigen::MatrixXd& emission,
                           PosteriorSink& sink);

struct DecodedSegment {
  std::size_t state;
  std::size_t duration;
  std::size_t start;  // index into LatticeInput::obs

  bool operator==(const DecodedSegment&) const = default;
};

struct Decoding {
  std::vector<DecodedSegment> path;
  double log_score = 0.0;
};

/// Max-product decoding; ties go to the lowest super-state index.
Decoding viterbi(const SegmentModel& model, const LatticeInput& in);

}  // namespace ihsmm
