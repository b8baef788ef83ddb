#include "ihsmm/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <numeric>

#include "ihsmm/errors.hpp"
#include "ihsmm/random.hpp"

namespace ihsmm::eval {

double f_measure(double precision, double recall) {
  const double s = precision + recall;
  return s > 0.0 ? 2.0 * precision * recall / s : 0.0;
}

MetricsReport confusion_metrics(std::span<const Prediction> predictions) {
  if (predictions.empty()) throw Error(ErrorCode::InvalidArgument, "no predictions");
  std::map<std::string, LabelMetrics> by_label;
  for (const auto& p : predictions) {
    auto& t = by_label[p.truth];
    auto& q = by_label[p.predicted];
    ++t.ap;
    ++q.pp;
    if (p.truth == p.predicted) ++t.tp;
  }
  MetricsReport report;
  for (auto& [name, m] : by_label) {
    m.label = name;
    m.precision = m.pp ? static_cast<double>(m.tp) / static_cast<double>(m.pp) : 0.0;
    m.recall = m.ap ? static_cast<double>(m.tp) / static_cast<double>(m.ap) : 0.0;
    m.f = f_measure(m.precision, m.recall);
    report.precision += m.precision;
    report.recall += m.recall;
    report.f += m.f;
    report.labels.push_back(m);
  }
  const auto n = static_cast<double>(report.labels.size());
  report.precision /= n;
  report.recall /= n;
  report.f /= n;
  return report;
}

double match_rate(std::span<const std::string> generated, std::span<const std::string> original) {
  if (original.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t t = 0; t < original.size() && t < generated.size(); ++t) hits += generated[t] == original[t];
  return static_cast<double>(hits) / static_cast<double>(original.size());
}

double reproducibility(const TrainedModel& model, const Sequence& original, const SymbolTable& table) {
  const Sequence w = generate(model, original.length(), GenerateMode::most_likely, 0);
  std::vector<std::string> gen, orig = decode_sequence(original, table);
  for (SymbolId s : w.obs) {
    const auto id = static_cast<std::size_t>(s);
    gen.push_back(model.alphabet.empty() ? table.name(s) : model.alphabet.at(id));
  }
  return match_rate(gen, orig);
}

namespace {

std::vector<double> ranks(std::span<const double> x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> r(x.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) ++j;
    const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
    i = j + 1;
  }
  return r;
}

}  // namespace

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error(ErrorCode::InvalidArgument, "spearman needs equal lengths");
  if (x.size() < 2) return 0.0;
  const auto rx = ranks(x), ry = ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

namespace {

/// First n sequences of data spread evenly over its labels.
Dataset take_balanced(const Dataset& data, std::size_t n) {
  Dataset out;
  out.table = data.table;
  out.split = data.split;
  out.labels = data.labels;
  const std::size_t L = data.labels.size();
  for (std::size_t l = 0; l < L; ++l) {
    const std::size_t want = n / L + (l < n % L ? 1 : 0);
    const auto seqs = data.with_label(l);
    for (std::size_t k = 0; k < want && k < seqs.size(); ++k) out.sequences.push_back(*seqs[k]);
  }
  out.normalize_labels();
  return out;
}

template <class F>
double median_seconds(std::size_t repeats, F&& f) {
  std::vector<double> times;
  for (std::size_t r = 0; r < std::max<std::size_t>(1, repeats); ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    const auto t1 = std::chrono::steady_clock::now();
    times.push_back(std::chrono::duration<double>(t1 - t0).count());
  }
  std::sort(times.begin(), times.end());
  return times[times.size() / 2];
}

}  // namespace

std::vector<TimingRow> benchmark_time(std::span<const ModelKind> kinds, std::span<const std::size_t> sizes,
                                      const BenchConfig& config) {
  std::vector<TimingRow> rows;
  if (sizes.empty()) return rows;
  for (std::size_t k = 1; k < sizes.size(); ++k)
    if (sizes[k] < sizes[k - 1]) throw Error(ErrorCode::InvalidArgument, "sizes must be ascending");
  for (ModelKind kind : kinds) {
    for (std::size_t n : sizes) {
      if (n == 0) throw Error(ErrorCode::InvalidArgument, "sizes must be positive");
      datagen::GenProfile p = config.profile;
      p.sequences_per_label = (n + p.num_labels - 1) / p.num_labels;
      const auto data = datagen::synth_dataset(p);
      const Dataset train = take_balanced(data.train, n);
      const Dataset test = take_balanced(data.test, n);
      std::vector<TrainedModel> bank;
      const double train_s = median_seconds(config.repeats, [&] {
        bank = train_bank(train, kind, config.states, config.max_duration, config.train);
      });
      const double rec_s = median_seconds(config.repeats, [&] {
        for (const auto& seq : test.sequences) (void)recognize(bank, seq);
      });
      rows.push_back({kind, n, "train", train_s});
      rows.push_back({kind, n, "recognize", rec_s});
    }
  }
  return rows;
}

double macro_f(const ComparisonResult& result, ModelKind kind, std::size_t states) {
  for (const auto& r : result.metrics)
    if (r.kind == kind && r.states == states && r.label == "macro") return r.f;
  return -1.0;
}

ComparisonResult run_comparison(const ComparisonConfig& config) {
  ComparisonResult result;
  struct Acc {
    double p = 0.0, r = 0.0, f = 0.0;
  };
  // (kind index, states index) -> label -> sums; "macro" collects the averages
  std::map<std::pair<std::size_t, std::size_t>, std::map<std::string, Acc>> sums;
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> done;

  for (std::size_t rep = 0; rep < config.repetitions; ++rep) {
    datagen::GenProfile p = config.profile;
    p.seed = derive_seed(config.profile.seed, rep);
    const auto data = datagen::synth_dataset(p);
    for (std::size_t ki = 0; ki < config.kinds.size(); ++ki) {
      for (std::size_t si = 0; si < config.state_counts.size(); ++si) {
        const ModelKind kind = config.kinds[ki];
        const std::size_t states = config.state_counts[si];
        TrainConfig tc = config.train;
        tc.seed = derive_seed(config.train.seed, rep);
        try {
          const auto bank = train_bank(data.train, kind, states, config.max_duration, tc, config.jobs);
          std::vector<Prediction> preds;
          for (const auto& seq : data.test.sequences)
            preds.push_back({data.test.labels.at(*seq.label), recognize(bank, seq).label});
          const auto report = confusion_metrics(preds);
          auto& cell = sums[{ki, si}];
          for (const auto& m : report.labels) {
            cell[m.label].p += m.precision;
            cell[m.label].r += m.recall;
            cell[m.label].f += m.f;
          }
          cell["macro"].p += report.precision;
          cell["macro"].r += report.recall;
          cell["macro"].f += report.f;
          ++done[{ki, si}];
        } catch (const std::exception& e) {
          result.failures.push_back(std::string(to_string(kind)) + " states=" + std::to_string(states) +
                                    " rep=" + std::to_string(rep) + ": " + e.what());
        }
      }
    }
  }
  for (const auto& [key, cell] : sums) {
    const double n = static_cast<double>(done[key]);
    for (const auto& [label, a] : cell) {
      if (label == "macro") continue;
      result.metrics.push_back({config.kinds[key.first], config.state_counts[key.second], label, a.p / n, a.r / n, a.f / n});
    }
    const auto& m = cell.at("macro");
    result.metrics.push_back({config.kinds[key.first], config.state_counts[key.second], "macro", m.p / n, m.r / n, m.f / n});
  }
  if (config.run_repro) result.repro = reproducibility_sweep(config, &result.failures);
  return result;
}

std::vector<ReproRow> reproducibility_sweep(const ComparisonConfig& config, std::vector<std::string>* failures) {
  std::vector<ReproRow> rows;
  std::vector<datagen::SynthData> points;
  for (std::size_t k = 0; k <= config.max_intervals; ++k) {
    datagen::GenProfile p = config.repro_profile;
    p.intervals_per_sequence = static_cast<int>(k);
    points.push_back(datagen::synth_dataset(p));
  }
  for (ModelKind kind : config.kinds) {
    for (std::size_t k = 0; k <= config.max_intervals; ++k) {
      const Dataset& data = points[k].train;
      double sum = 0.0;
      std::size_t n = 0;
      for (std::size_t i = 0; i < data.sequences.size(); ++i) {
        const Sequence& seq = data.sequences[i];
        std::optional<TrainedModel> best;
        std::string error;
        for (std::size_t r = 0; r < std::max<std::size_t>(1, config.restarts); ++r) {
          TrainConfig tc = config.train;
          tc.seed = derive_seed(derive_seed(config.train.seed, i), r);
          try {
            TrainedModel m = train_model(kind, std::span<const Sequence>(&seq, 1), data.table.size(),
                                         config.repro_states, config.max_duration, tc);
            if (!best || m.log_likelihood > best->log_likelihood) best = std::move(m);
          } catch (const std::exception& e) {
            if (error.empty()) error = e.what();
          }
        }
        if (!best) {
          if (failures)
            failures->push_back(std::string(to_string(kind)) + " intervals=" + std::to_string(k) + " sequence=" +
                                std::to_string(i) + ": " + error);
          continue;
        }
        best->alphabet = data.table.names();
        sum += reproducibility(*best, seq, data.table);
        ++n;
      }
      rows.push_back({kind, k, n ? sum / static_cast<double>(n) : 0.0});
    }
  }
  return rows;
}

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

std::string metrics_csv(std::span<const MetricRow> rows) {
  std::string out = "kind,states,label,precision,recall,f\n";
  for (const auto& r : rows)
    out += std::string(to_string(r.kind)) + "," + std::to_string(r.states) + "," + r.label + "," + fmt(r.precision) +
           "," + fmt(r.recall) + "," + fmt(r.f) + "\n";
  return out;
}

std::string repro_csv(std::span<const ReproRow> rows) {
  std::string out = "kind,num_intervals,r\n";
  for (const auto& r : rows)
    out += std::string(to_string(r.kind)) + "," + std::to_string(r.num_intervals) + "," + fmt(r.r) + "\n";
  return out;
}

std::string times_csv(std::span<const TimingRow> rows) {
  std::string out = "kind,n,phase,seconds\n";
  for (const auto& r : rows)
    out += std::string(to_string(r.kind)) + "," + std::to_string(r.n) + "," + r.phase + "," + fmt(r.seconds) + "\n";
  return out;
}

}  // namespace ihsmm::eval
