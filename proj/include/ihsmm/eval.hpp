#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ihsmm/datagen.hpp"
#include "ihsmm/model.hpp"

namespace ihsmm::eval {

struct Prediction {
  std::string truth;
  std::string predicted;
};

struct LabelMetrics {
  std::string label;
  std::size_t tp = 0;
  std::size_t pp = 0;  // predicted as this label
  std::size_t ap = 0;  // actually this label
  double precision = 0.0;
  double recall = 0.0;
  double f = 0.0;
};

/// Per-label scores over the union of true and predicted labels, sorted by
/// label, and their macro averages.
struct MetricsReport {
  std::vector<LabelMetrics> labels;
  double precision = 0.0;
  double recall = 0.0;
  double f = 0.0;
};

double f_measure(double precision, double recall);
MetricsReport confusion_metrics(std::span<const Prediction> predictions);

/// Fraction of positions where the two name sequences agree, over the
/// length of original; missing generated ticks count as mismatches.
double match_rate(std::span<const std::string> generated, std::span<const std::string> original);

/// Generates original.length() ticks in most-likely mode and compares them
/// with original by symbol name.
double reproducibility(const TrainedModel& model, const Sequence& original,
                       const SymbolTable& table);

/// Rank correlation with average ranks for ties; 0 when either side is
/// constant.
double spearman(std::span<const double> x, std::span<const double> y);

struct BenchConfig {
  datagen::GenProfile profile = datagen::timing_profile();
  std::size_t states = 5;
  std::size_t max_duration = 10;
  /// Fixed iteration budget so sizes are compared on equal work.
  TrainConfig train{.epsilon = 1e-300, .max_iters = 10};
  std::size_t repeats = 3;
};

struct TimingRow {
  ModelKind kind;
  std::size_t n;       // training sequences
  std::string phase;   // "train" or "recognize"
  double seconds;      // median over repeats
};

/// For every kind and size n, trains a bank on n sequences spread over the
/// profile's labels and recognizes n test sequences. Rows ordered by kind,
/// then n, then phase.
std::vector<TimingRow> benchmark_time(std::span<const ModelKind> kinds,
                                      std::span<const std::size_t> sizes,
                                      const BenchConfig& config);

struct ComparisonConfig {
  datagen::GenProfile profile = datagen::interval_signature_profile();
  std::vector<std::size_t> state_counts{5};
  std::vector<ModelKind> kinds{ModelKind::hsmm, ModelKind::is_hsmm, ModelKind::ilp_hsmm};
  std::size_t max_duration = 10;
  TrainConfig train;
  std::size_t repetitions = 5;
  /// Reproducibility sweep: each sequence gets its own model.
  datagen::GenProfile repro_profile = datagen::repro_profile();
  std::size_t repro_states = 6;
  /// Training restarts per sweep sequence; the best log-likelihood is kept.
  std::size_t restarts = 5;
  std::size_t max_intervals = 8;  // sweep 0..max_intervals; skipped when 0 and no repro
  bool run_repro = true;
  std::size_t jobs = 1;
};

struct MetricRow {
  ModelKind kind;
  std::size_t states;
  std::string label;  // "macro" for the average row
  double precision;
  double recall;
  double f;
};

struct ReproRow {
  ModelKind kind;
  std::size_t num_intervals;
  double r;  // mean over the sweep point's sequences
};

struct ComparisonResult {
  std::vector<MetricRow> metrics;  // per-label scores averaged over repetitions
  std::vector<ReproRow> repro;
  std::vector<std::string> failures;  // cells whose training failed
};

/// Macro f of one (kind, states) cell; -1 when absent.
double macro_f(const ComparisonResult& result, ModelKind kind, std::size_t states);

ComparisonResult run_comparison(const ComparisonConfig& config);

/// Reproducibility sweep alone.
std::vector<ReproRow> reproducibility_sweep(const ComparisonConfig& config,
                                            std::vector<std::string>* failures = nullptr);

std::string metrics_csv(std::span<const MetricRow> rows);
std::string repro_csv(std::span<const ReproRow> rows);
std::string times_csv(std::span<const TimingRow> rows);

}  // namespace ihsmm::eval
