#include "ihsmm/model.hpp"

#include <atomic>
#include <exception>
#include <thread>

#include "estimate.hpp"
#include "ihsmm/dataset.hpp"
#include "ihsmm/errors.hpp"
#include "ihsmm/hsmm.hpp"
#include "ihsmm/ilp_hsmm.hpp"
#include "ihsmm/is_hsmm.hpp"
#include "ihsmm/logmath.hpp"
#include "ihsmm/random.hpp"

namespace ihsmm {

TrainedModel train_model(ModelKind kind, std::span<const Sequence> sequences,
                         std::size_t alphabet_size, std::size_t states, std::size_t max_duration,
                         const TrainConfig& config, const IterationObserver& observer) {
  switch (kind) {
    case ModelKind::hsmm:
      return hsmm::train(sequences, alphabet_size, states, max_duration, config, observer);
    case ModelKind::is_hsmm:
      return is::train_is(sequences, alphabet_size, states, max_duration, config, observer);
    case ModelKind::ilp_hsmm:
      return ilp::train_ilp(sequences, alphabet_size, states, max_duration, config, observer);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown model kind");
}

namespace {

std::uint64_t label_hash(const std::string& label) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char c : label) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::vector<TrainedModel> train_bank(const Dataset& data, ModelKind kind, std::size_t states,
                                     std::size_t max_duration, const TrainConfig& config,
                                     std::size_t jobs) {
  config.validate();
  const std::size_t L = data.labels.size();
  if (L == 0) throw Error(ErrorCode::InvalidArgument, "dataset has no labels");
  std::vector<std::optional<TrainedModel>> slots(L);
  std::vector<std::exception_ptr> errors(L);
  std::atomic<std::size_t> next{0};

  auto worker = [&]() {
    for (std::size_t l = next++; l < L; l = next++) {
      try {
        std::vector<Sequence> seqs;
        for (const Sequence* s : data.with_label(l)) seqs.push_back(*s);
        TrainConfig cfg = config;
        cfg.seed = derive_seed(config.seed, label_hash(data.labels[l]));
        TrainedModel m = train_model(kind, seqs, data.table.size(), states, max_duration, cfg);
        m.label = data.labels[l];
        m.alphabet = data.table.names();
        slots[l] = std::move(m);
      } catch (...) {
        errors[l] = std::current_exception();
      }
    }
  };

  const std::size_t n = std::max<std::size_t>(1, std::min(jobs, L));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::vector<TrainedModel> bank;
  bank.reserve(L);
  for (auto& s : slots) bank.push_back(std::move(*s));
  return bank;
}

double score(const TrainedModel& model, const Sequence& seq) {
  const auto& cfg = model.config;
  return std::visit(
      [&](const auto& p) -> double {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, HsmmParams>)
          return hsmm::forward(p, seq, cfg.input_view, cfg.length_mode).log_likelihood;
        else if constexpr (std::is_same_v<P, IsHsmmParams>)
          return is::forward_is(p, seq, cfg.length_mode).log_likelihood;
        else
          return ilp::score(p, seq, cfg.ilp_score, cfg.length_mode);
      },
      model.params);
}

Recognition recognize(std::span<const TrainedModel> bank, const Sequence& seq) {
  if (bank.empty()) throw Error(ErrorCode::InvalidArgument, "empty model bank");
  Recognition r;
  r.scores.reserve(bank.size());
  for (const auto& m : bank) r.scores.push_back(score(m, seq));
  r.best = 0;
  for (std::size_t z = 1; z < bank.size(); ++z) {
    const double a = r.scores[z], b = r.scores[r.best];
    if (a > b || (a == b && bank[z].label < bank[r.best].label)) r.best = z;
  }
  r.label = bank[r.best].label;
  r.log_score = r.scores[r.best];
  r.all_impossible = r.log_score == kNegInf;
  return r;
}

Sequence generate(const TrainedModel& model, std::size_t length, GenerateMode mode, std::uint64_t seed) {
  return std::visit(
      [&](const auto& p) -> Sequence {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, HsmmParams>)
          return hsmm::generate(p, length, mode, seed);
        else if constexpr (std::is_same_v<P, IsHsmmParams>)
          return is::generate(p, length, mode, seed);
        else
          return ilp::generate(p, length, mode, seed);
      },
      model.params);
}

}  // namespace ihsmm
