// ihsmm: generate data, train model banks, recognize, evaluate, benchmark.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "ihsmm/dataset.hpp"
#include "ihsmm/datagen.hpp"
#include "ihsmm/errors.hpp"
#include "ihsmm/eval.hpp"
#include "ihsmm/model.hpp"
#include "ihsmm/model_io.hpp"

namespace fs = std::filesystem;
using namespace ihsmm;

namespace {

std::string num(double v) {
  if (std::isinf(v)) return v < 0 ? "-inf" : "inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

std::vector<std::size_t> parse_sizes(const std::string& s) {
  std::vector<std::size_t> out;
  for (const auto& item : split_list(s)) {
    std::size_t pos = 0;
    unsigned long v = 0;
    try {
      v = std::stoul(item, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != item.size()) throw Error(ErrorCode::InvalidArgument, "not a size: '" + item + "'");
    out.push_back(v);
  }
  return out;
}

std::vector<ModelKind> parse_kinds(const std::string& s) {
  std::vector<ModelKind> out;
  for (const auto& k : split_list(s)) out.push_back(parse_model_kind(k));
  if (out.empty()) throw Error(ErrorCode::InvalidArgument, "no model kinds given");
  return out;
}

/// Checks that the dataset alphabet is the one the bank was trained on.
void check_alphabet(const std::vector<TrainedModel>& bank, const Dataset& data) {
  if (bank.empty()) throw Error(ErrorCode::ValidationError, "empty model bank");
  for (const auto& m : bank)
    if (!m.alphabet.empty() && m.alphabet != data.table.names())
      throw Error(ErrorCode::ValidationError, "dataset alphabet differs from the bank of '" + m.label + "'");
}

struct TrainFlags {
  std::string data, out, log, kind = "hsmm", view = "filled", length_mode = "clamp", ilp_score = "viterbi";
  std::size_t states = 5, dmax = 10;
  TrainConfig config;
};

TrainConfig finish_config(TrainFlags& f, std::uint64_t seed) {
  TrainConfig c = f.config;
  c.seed = seed;
  if (f.view != "filled" && f.view != "stripped") throw Error(ErrorCode::InvalidArgument, "--view must be filled or stripped");
  c.input_view = f.view == "filled" ? InputView::filled : InputView::stripped;
  if (f.length_mode != "clamp" && f.length_mode != "strict")
    throw Error(ErrorCode::InvalidArgument, "--length-mode must be clamp or strict");
  c.length_mode = f.length_mode == "clamp" ? LengthMode::clamp : LengthMode::strict;
  if (f.ilp_score != "viterbi" && f.ilp_score != "forward")
    throw Error(ErrorCode::InvalidArgument, "--ilp-score must be viterbi or forward");
  c.ilp_score = f.ilp_score == "viterbi" ? IlpScore::viterbi : IlpScore::forward;
  c.validate();
  return c;
}

void add_train_options(CLI::App* cmd, TrainFlags& f) {
  cmd->add_option("--states", f.states, "hidden states per model")->capture_default_str();
  cmd->add_option("--dmax", f.dmax, "maximum state duration")->capture_default_str();
  cmd->add_option("--epsilon", f.config.epsilon, "convergence threshold")->capture_default_str();
  cmd->add_option("--max-iters", f.config.max_iters, "EM iteration cap")->capture_default_str();
  cmd->add_option("--kappa", f.config.kappa, "count smoothing")->capture_default_str();
  cmd->add_option("--view", f.view, "baseline input: filled or stripped")->capture_default_str();
  cmd->add_option("--length-mode", f.length_mode, "clamp or strict")->capture_default_str();
  cmd->add_option("--max-interval", f.config.max_interval, "interval buckets (is-hsmm)")->capture_default_str();
  cmd->add_option("--delta-pt", f.config.delta_pt, "density threshold (ilp-hsmm)")->capture_default_str();
  cmd->add_option("--c", f.config.c, "out-of-range attenuation (ilp-hsmm)")->capture_default_str();
  cmd->add_option("--sigma-min", f.config.sigma_min, "interval sigma floor (ilp-hsmm)")->capture_default_str();
  cmd->add_option("--ilp-score", f.ilp_score, "viterbi or forward")->capture_default_str();
}

void cmd_gen(const std::string& profile_path, const std::string& out_dir, std::uint64_t seed, bool seed_set) {
  datagen::GenProfile p = profile_path.empty() ? datagen::default_profile() : datagen::load_profile(profile_path);
  if (seed_set) p.seed = seed;
  const auto data = datagen::synth_dataset(p);
  fs::create_directories(out_dir);
  save_dataset(fs::path(out_dir) / "train.jsonl", data.train);
  save_dataset(fs::path(out_dir) / "test.jsonl", data.test);
  spdlog::info("wrote {} train and {} test sequences to {}", data.train.sequences.size(),
               data.test.sequences.size(), out_dir);
}

void cmd_train(TrainFlags& f, std::uint64_t seed, std::size_t jobs) {
  const ModelKind kind = parse_model_kind(f.kind);
  const TrainConfig cfg = finish_config(f, seed);
  const Dataset data = load_dataset(f.data);
  spdlog::info("training {} on {} sequences, {} labels", f.kind, data.sequences.size(), data.labels.size());
  const auto bank = train_bank(data, kind, f.states, f.dmax, cfg, jobs);
  save_bank(f.out, bank);
  if (!f.log.empty()) {
    std::string csv = "label,iteration,log_likelihood,delta\n";
    for (const auto& m : bank)
      for (std::size_t h = 1; h < m.history.size(); ++h)
        csv += m.label + "," + std::to_string(h) + "," + num(m.history[h]) + "," +
               num(m.history[h] - m.history[h - 1]) + "\n";
    write_file_atomic(f.log, csv);
  }
  for (const auto& m : bank) spdlog::info("{}: log-likelihood {} after {} iterations", m.label, m.log_likelihood, m.iterations);
}

std::string predictions_csv(const std::vector<TrainedModel>& bank, const Dataset& data) {
  std::string csv = "index,kind,states,truth,predicted,log_score,all_impossible";
  for (const auto& m : bank) csv += ",score:" + m.label;
  csv += "\n";
  const auto kind = std::string(to_string(bank.front().kind()));
  const auto states = std::to_string(base_params(bank.front().params).M);
  for (std::size_t n = 0; n < data.sequences.size(); ++n) {
    const auto& seq = data.sequences[n];
    const auto r = recognize(bank, seq);
    csv += std::to_string(n) + "," + kind + "," + states + "," + (seq.label ? data.labels[*seq.label] : "") + "," +
           r.label + "," + num(r.log_score) + "," + (r.all_impossible ? "1" : "0");
    for (double s : r.scores) csv += "," + num(s);
    csv += "\n";
  }
  return csv;
}

void cmd_recognize(const std::string& bank_path, const std::string& data_path, const std::string& out) {
  const auto bank = load_bank(bank_path);
  const Dataset data = load_dataset(data_path);
  check_alphabet(bank, data);
  write_file_atomic(out, predictions_csv(bank, data));
}

std::vector<std::string> csv_fields(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

void cmd_eval(const std::string& predictions, const std::string& bank_path, const std::string& data_path,
              const std::string& out) {
  std::string csv;
  if (!predictions.empty()) {
    csv = [&] {
      std::ifstream in(predictions);
      if (!in) throw Error(ErrorCode::IoError, "cannot open '" + predictions + "'");
      std::ostringstream ss;
      ss << in.rdbuf();
      return ss.str();
    }();
  } else {
    if (bank_path.empty() || data_path.empty())
      throw Error(ErrorCode::InvalidArgument, "eval needs --predictions or both --bank and --data");
    const auto bank = load_bank(bank_path);
    const Dataset data = load_dataset(data_path);
    check_alphabet(bank, data);
    csv = predictions_csv(bank, data);
  }
  std::stringstream ss(csv);
  std::string line;
  std::getline(ss, line);
  const auto header = csv_fields(line);
  if (header.size() < 5 || header[1] != "kind" || header[2] != "states" || header[3] != "truth" || header[4] != "predicted")
    throw Error(ErrorCode::SchemaError, "unexpected predictions header", 1);
  std::vector<eval::Prediction> preds;
  std::string kind, states;
  std::size_t lineno = 1;
  while (std::getline(ss, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = csv_fields(line);
    if (f.size() < 5) throw Error(ErrorCode::SchemaError, "short predictions row", lineno);
    kind = f[1];
    states = f[2];
    preds.push_back({f[3], f[4]});
  }
  const auto report = eval::confusion_metrics(preds);
  const ModelKind k = parse_model_kind(kind);
  const auto M = parse_sizes(states).at(0);
  std::vector<eval::MetricRow> rows;
  for (const auto& m : report.labels) rows.push_back({k, M, m.label, m.precision, m.recall, m.f});
  rows.push_back({k, M, "macro", report.precision, report.recall, report.f});
  write_file_atomic(out, eval::metrics_csv(rows));
  spdlog::info("macro precision {:.4f} recall {:.4f} f {:.4f}", report.precision, report.recall, report.f);
}

void cmd_repro(const std::string& bank_path, const std::string& data_path, const std::string& out) {
  const auto bank = load_bank(bank_path);
  const Dataset data = load_dataset(data_path);
  check_alphabet(bank, data);
  std::map<std::string, const TrainedModel*> by_label;
  for (const auto& m : bank) by_label[m.label] = &m;
  std::map<std::size_t, std::pair<double, std::size_t>> by_count;
  for (const auto& seq : data.sequences) {
    if (!seq.label) continue;
    auto it = by_label.find(data.labels[*seq.label]);
    if (it == by_label.end()) continue;
    auto& cell = by_count[segment_runs(seq).internal_intervals()];
    cell.first += eval::reproducibility(*it->second, seq, data.table);
    ++cell.second;
  }
  std::vector<eval::ReproRow> rows;
  for (const auto& [k, cell] : by_count)
    rows.push_back({bank.front().kind(), k, cell.first / static_cast<double>(cell.second)});
  write_file_atomic(out, eval::repro_csv(rows));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interval-aware hidden semi-Markov models"};
  app.require_subcommand(1);
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
  std::string log_level = "warn";
  auto* seed_opt = app.add_option("--seed", seed, "random seed")->capture_default_str();
  app.add_option("--jobs", jobs, "parallel training jobs")->capture_default_str();
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error or off")->capture_default_str();

  std::string profile, out, data, bank, predictions;
  auto* gen = app.add_subcommand("gen", "generate a synthetic train/test dataset");
  gen->add_option("--profile", profile, "profile JSON (default: built-in)");
  gen->add_option("--out", out, "output directory")->required();

  TrainFlags tf;
  auto* train = app.add_subcommand("train", "train one model per label");
  train->add_option("--data", tf.data, "training dataset (JSONL)")->required();
  train->add_option("--kind", tf.kind, "hsmm, is-hsmm or ilp-hsmm")->capture_default_str();
  train->add_option("--out", tf.out, "model bank output (JSON)")->required();
  train->add_option("--log", tf.log, "training log CSV");
  add_train_options(train, tf);

  auto* rec = app.add_subcommand("recognize", "classify every sequence of a dataset");
  rec->add_option("--bank", bank, "model bank")->required();
  rec->add_option("--data", data, "dataset")->required();
  rec->add_option("--out", out, "predictions CSV")->required();

  auto* ev = app.add_subcommand("eval", "precision, recall and f-measure");
  ev->add_option("--predictions", predictions, "predictions CSV from recognize");
  ev->add_option("--bank", bank, "model bank (with --data)");
  ev->add_option("--data", data, "dataset (with --bank)");
  ev->add_option("--out", out, "metrics CSV")->required();

  auto* rp = app.add_subcommand("repro", "reproducibility of each sequence under its label's model");
  rp->add_option("--bank", bank, "model bank")->required();
  rp->add_option("--data", data, "dataset")->required();
  rp->add_option("--out", out, "repro CSV")->required();

  std::string sizes = "16,32", kinds = "hsmm,is-hsmm,ilp-hsmm", state_list = "5";
  std::size_t repeats = 3, reps = 5, max_intervals = 8, repro_states = 6, restarts = 5;
  bool no_repro = false;
  std::string repro_profile;
  TrainFlags bf;
  auto* bench = app.add_subcommand("bench", "training and recognition wall time");
  bench->add_option("--profile", profile, "profile JSON (default: timing profile)");
  bench->add_option("--sizes", sizes, "ascending training-set sizes")->capture_default_str();
  bench->add_option("--kinds", kinds, "model kinds")->capture_default_str();
  bench->add_option("--repeats", repeats, "runs per measurement (median)")->capture_default_str();
  bench->add_option("--out", out, "times CSV")->required();
  bf.config.epsilon = 1e-300;
  bf.config.max_iters = 10;
  add_train_options(bench, bf);

  TrainFlags cf;
  auto* cmp = app.add_subcommand("compare", "recognition and reproducibility across model kinds");
  cmp->add_option("--profile", profile, "recognition profile JSON (default: interval signature)");
  cmp->add_option("--repro-profile", repro_profile, "reproducibility profile JSON");
  cmp->add_option("--state-counts", state_list, "state counts")->capture_default_str();
  cmp->add_option("--kinds", kinds, "model kinds")->capture_default_str();
  cmp->add_option("--reps", reps, "repetitions")->capture_default_str();
  cmp->add_option("--max-intervals", max_intervals, "reproducibility sweep upper end")->capture_default_str();
  cmp->add_option("--repro-states", repro_states, "states for reproducibility models")->capture_default_str();
  cmp->add_option("--restarts", restarts, "training restarts per reproducibility model")->capture_default_str();
  cmp->add_flag("--no-repro", no_repro, "skip the reproducibility sweep");
  cmp->add_option("--out", out, "output directory")->required();
  add_train_options(cmp, cf);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error[InvalidArgument]: " << e.what() << "\n";
    return 2;
  }

  try {
    const auto level = spdlog::level::from_str(log_level);
    if (level == spdlog::level::off && log_level != "off")
      throw Error(ErrorCode::InvalidArgument, "unknown log level '" + log_level + "'");
    spdlog::set_level(level);
    spdlog::set_default_logger(spdlog::default_logger()->clone("ihsmm"));
    spdlog::set_pattern("[%l] %v");

    if (*gen) {
      cmd_gen(profile, out, seed, seed_opt->count() > 0);
    } else if (*train) {
      cmd_train(tf, seed, jobs);
    } else if (*rec) {
      cmd_recognize(bank, data, out);
    } else if (*ev) {
      cmd_eval(predictions, bank, data, out);
    } else if (*rp) {
      cmd_repro(bank, data, out);
    } else if (*bench) {
      eval::BenchConfig bc;
      if (!profile.empty()) bc.profile = datagen::load_profile(profile);
      bc.states = bf.states;
      bc.max_duration = bf.dmax;
      bc.train = finish_config(bf, seed);
      bc.repeats = repeats;
      const auto ks = parse_kinds(kinds);
      const auto ns = parse_sizes(sizes);
      const auto rows = eval::benchmark_time(ks, ns, bc);
      write_file_atomic(out, eval::times_csv(rows));
    } else if (*cmp) {
      eval::ComparisonConfig cc;
      if (!profile.empty()) cc.profile = datagen::load_profile(profile);
      if (!repro_profile.empty()) cc.repro_profile = datagen::load_profile(repro_profile);
      cc.state_counts = parse_sizes(state_list);
      cc.kinds = parse_kinds(kinds);
      cc.max_duration = cf.dmax;
      cc.train = finish_config(cf, seed);
      cc.repetitions = reps;
      cc.max_intervals = max_intervals;
      cc.repro_states = repro_states;
      cc.restarts = restarts;
      cc.run_repro = !no_repro;
      cc.jobs = jobs;
      const auto res = eval::run_comparison(cc);
      fs::create_directories(out);
      write_file_atomic(fs::path(out) / "metrics.csv", eval::metrics_csv(res.metrics));
      if (cc.run_repro) {
        write_file_atomic(fs::path(out) / "repro.csv", eval::repro_csv(res.repro));
        // gnuplot: one block per kind, separated by two blank lines
        std::string dat;
        for (ModelKind k : cc.kinds) {
          dat += "# " + std::string(to_string(k)) + "\n";
          for (const auto& r : res.repro)
            if (r.kind == k) dat += std::to_string(r.num_intervals) + " " + num(r.r) + "\n";
          dat += "\n\n";
        }
        write_file_atomic(fs::path(out) / "repro.dat", dat);
      }
      for (const auto& f : res.failures) spdlog::warn("failed cell: {}", f);
    }
  } catch (const Error& e) {
    std::cerr << "error[" << to_string(e.code()) << "]: " << e.what() << "\n";
    return e.is_validation() ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error[Runtime]: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
