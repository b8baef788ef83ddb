#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "ihsmm/params.hpp"
#include "ihsmm/sequence.hpp"

namespace ihsmm {

struct Dataset;

struct IterationInfo {
  std::size_t iteration;  // 1-based
  double log_likelihood;  // of the parameters produced by this iteration
  double delta;
  const ModelParams& params;
};

/// Called once after every re-estimation.
using IterationObserver = std::function<void(const IterationInfo&)>;

struct TrainedModel {
  std::string label;
  ModelParams params;
  double log_likelihood = 0.0;
  std::size_t iterations = 0;
  TrainConfig config;
  std::vector<std::string> alphabet;
  /// Training objective before the first and after every iteration. Not
  /// serialized.
  std::vector<double> history;

  ModelKind kind() const { return kind_of(params); }
};

/// Trains one model on the sequences of a single label.
TrainedModel train_model(ModelKind kind, std::span<const Sequence> sequences,
                         std::size_t alphabet_size, std::size_t states,
                         std::size_t max_duration, const TrainConfig& config,
                         const IterationObserver& observer = {});

/// One model per label of data, in label order. Labels train independently
/// on up to jobs threads; each label's seed is derived from config.seed and
/// the label name, so the bank does not depend on jobs.
std::vector<TrainedModel> train_bank(const Dataset& data, ModelKind kind, std::size_t states,
                                     std::size_t max_duration, const TrainConfig& config,
                                     std::size_t jobs = 1);

/// Recognition score of seq under model: forward log-likelihood, or the best
/// path score for the interval-length model in its default Viterbi mode.
double score(const TrainedModel& model, const Sequence& seq);

struct Recognition {
  std::size_t best = 0;  // index into the bank
  std::string label;
  double log_score = 0.0;
  std::vector<double> scores;  // bank order
  bool all_impossible = false;
};

/// Maximum-score label. Ties, including the all -inf case, go to the
/// lexicographically lowest label, which is also the lowest label id.
Recognition recognize(std::span<const TrainedModel> bank, const Sequence& seq);

enum class GenerateMode { most_likely, sampled };

Sequence generate(const TrainedModel& model, std::size_t length, GenerateMode mode,
                  std::uint64_t seed = 0);

}  // namespace ihsmm
