#include "ihsmm/hsmm.hpp"

#include "estimate.hpp"
#include "ihsmm/errors.hpp"
#include "ihsmm/logmath.hpp"
#include "ihsmm/random.hpp"

namespace ihsmm::hsmm {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

HsmmParams init_params(std::size_t M, std::size_t N, std::size_t Dmax, std::uint64_t seed) {
  if (M == 0 || N == 0 || Dmax == 0) throw Error(ErrorCode::InvalidDims, "M, N and Dmax must be positive");
  Rng rng(seed);
  HsmmParams p;
  p.M = M;
  p.N = N;
  p.Dmax = Dmax;
  const auto S = static_cast<Index>(M * Dmax);
  p.pi = detail::random_distribution(rng, S);
  p.A = detail::random_rows(rng, S, S, static_cast<Index>(Dmax));
  p.B = detail::random_rows(rng, static_cast<Index>(M), static_cast<Index>(N));
  return p;
}

BaseModel::BaseModel(const HsmmParams& params)
    : params_(&params), log_a_(log_exact(params.A.array())), log_b_(log_exact(params.B.array())) {}

LatticeInput make_input(const Sequence& seq, InputView view) {
  return view == InputView::filled ? filled_input(seq) : stripped_input(seq);
}

double emission_block(const HsmmParams& params, std::size_t j, std::span<const SymbolId> window) {
  double acc = 0.0;
  for (SymbolId s : window) acc += safe_log(params.B(static_cast<Index>(j), s));
  return acc;
}

namespace {

LatticeInput checked_input(const BaseModel& model, const HsmmParams& params, const Sequence& seq,
                           InputView view, LengthMode mode) {
  detail::check_symbols(seq, params.N);
  LatticeInput in = make_input(seq, view);
  detail::check_length(model, in, mode);
  return in;
}

class CountSink : public PosteriorSink {
 public:
  explicit CountSink(Counts& counts) : counts_(counts) {}
  void initial(std::size_t, const VectorXd& posterior) override { counts_.initial += posterior; }
  void transition(std::size_t, const MatrixXd& posterior) override { counts_.transition += posterior; }

 private:
  Counts& counts_;
};

std::pair<Counts, double> estep(const HsmmParams& params, std::span<const Sequence> batch,
                                InputView view, LengthMode mode) {
  BaseModel model(params);
  Counts counts(params.super_states(), params.M, params.N);
  CountSink sink(counts);
  std::size_t finite = 0;
  for (const auto& seq : batch) {
    const LatticeInput in = checked_input(model, params, seq, view, mode);
    const Lattice lat = forward_backward(model, in);
    if (!std::isfinite(lat.log_likelihood)) {
      ++counts.impossible;
      continue;
    }
    ++finite;
    counts.log_likelihood += lat.log_likelihood;
    accumulate_posteriors(model, in, lat, counts.emission, sink);
  }
  const double ll = finite ? counts.log_likelihood : kNegInf;
  return {std::move(counts), ll};
}

}  // namespace

Lattice forward(const HsmmParams& params, const Sequence& seq, InputView view, LengthMode mode) {
  BaseModel model(params);
  return ihsmm::forward(model, checked_input(model, params, seq, view, mode));
}

Lattice backward(const HsmmParams& params, const Sequence& seq, InputView view, LengthMode mode) {
  return forward_backward(params, seq, view, mode);
}

Lattice forward_backward(const HsmmParams& params, const Sequence& seq, InputView view,
                         LengthMode mode) {
  BaseModel model(params);
  return ihsmm::forward_backward(model, checked_input(model, params, seq, view, mode));
}

Decoding viterbi(const HsmmParams& params, const Sequence& seq, InputView view) {
  BaseModel model(params);
  return ihsmm::viterbi(model, checked_input(model, params, seq, view, LengthMode::clamp));
}

Counts::Counts(std::size_t super_states, std::size_t M, std::size_t N)
    : initial(VectorXd::Zero(static_cast<Index>(super_states))),
      transition(MatrixXd::Zero(static_cast<Index>(super_states), static_cast<Index>(super_states))),
      emission(MatrixXd::Zero(static_cast<Index>(M), static_cast<Index>(N))) {}

Counts expected_counts(const HsmmParams& params, std::span<const Sequence> batch,
                       std::span<const Lattice> lattices, InputView view) {
  if (lattices.size() != batch.size()) throw Error(ErrorCode::InvalidArgument, "one lattice per sequence expected");
  BaseModel model(params);
  Counts counts(params.super_states(), params.M, params.N);
  CountSink sink(counts);
  for (std::size_t n = 0; n < batch.size(); ++n) {
    if (!std::isfinite(lattices[n].log_likelihood)) {
      ++counts.impossible;
      continue;
    }
    counts.log_likelihood += lattices[n].log_likelihood;
    accumulate_posteriors(model, make_input(batch[n], view), lattices[n], counts.emission, sink);
  }
  return counts;
}

HsmmParams maximize(const HsmmParams& params, const Counts& counts, double kappa) {
  HsmmParams out = params;
  if (auto pi = detail::normalize_counts(counts.initial, kappa)) out.pi = *pi;
  detail::update_rows(out.A, counts.transition, kappa, static_cast<Index>(params.Dmax));
  detail::update_rows(out.B, counts.emission, kappa);
  return out;
}

HsmmParams reestimate(const HsmmParams& params, std::span<const Sequence> batch,
                      std::span<const Lattice> lattices, double kappa, InputView view) {
  const Counts counts = expected_counts(params, batch, lattices, view);
  if (counts.impossible == batch.size())
    throw Error(ErrorCode::DegenerateLattice, "every sequence has zero likelihood");
  return maximize(params, counts, kappa);
}

double log_likelihood(const HsmmParams& params, std::span<const Sequence> batch, InputView view,
                      LengthMode mode) {
  double total = 0.0;
  for (const auto& seq : batch) {
    const double ll = forward(params, seq, view, mode).log_likelihood;
    if (std::isfinite(ll)) total += ll;
  }
  return total;
}

TrainedModel train(std::span<const Sequence> sequences, std::size_t N, std::size_t M,
                   std::size_t Dmax, const TrainConfig& config, const IterationObserver& observer) {
  config.validate();
  if (sequences.empty()) throw Error(ErrorCode::InvalidArgument, "no training sequences");
  HsmmParams params = init_params(M, N, Dmax, config.seed);
  const InputView view = config.input_view;
  const LengthMode mode = config.length_mode;
  auto res = detail::run_em(
      params, [&](const HsmmParams& p) { return estep(p, sequences, view, mode); },
      [&](const HsmmParams& p, const Counts& c) { return maximize(p, c, config.kappa); }, config,
      observer);
  TrainedModel model{.label = {}, .params = std::move(params), .log_likelihood = res.log_likelihood,
                     .iterations = res.iterations, .config = config, .alphabet = {},
                     .history = std::move(res.history)};
  return model;
}

Eigen::MatrixXd transition_occupancy(const HsmmParams& params, std::span<const Sequence> batch,
                                     InputView view) {
  const auto [counts, ll] = estep(params, batch, view, LengthMode::clamp);
  (void)ll;
  const auto M = static_cast<Index>(params.M), D = static_cast<Index>(params.Dmax);
  MatrixXd occ = MatrixXd::Zero(M, M);
  for (Index i = 0; i < M; ++i)
    for (Index j = 0; j < M; ++j) occ(i, j) = counts.transition.block(i * D, j * D, D, D).sum();
  return occ;
}

Sequence generate(const HsmmParams& params, std::size_t length, GenerateMode mode,
                  std::uint64_t seed) {
  Rng rng(seed);
  const bool greedy = mode == GenerateMode::most_likely;
  auto pick_row = [&](const MatrixXd& m, Index r) -> Index {
    if (greedy) return detail::argmax_row(m, r);
    const VectorXd row = m.row(r).transpose();
    return static_cast<Index>(rng.categorical({row.data(), static_cast<std::size_t>(row.size())}));
  };
  Sequence out;
  if (length == 0) return out;
  const auto D = static_cast<Index>(params.Dmax);
  Index k = greedy ? detail::argmax(params.pi)
                   : static_cast<Index>(rng.categorical({params.pi.data(), static_cast<std::size_t>(params.pi.size())}));
  while (out.obs.size() < length) {
    const Index j = k / D, d = k % D + 1;
    for (Index t = 0; t < d && out.obs.size() < length; ++t)
      out.obs.push_back(static_cast<SymbolId>(pick_row(params.B, j)));
    if (out.obs.size() >= length) break;
    if (params.M == 1) {
      out.obs.resize(length, SymbolTable::kInterval);
      break;
    }
    k = pick_row(params.A, k);
  }
  return out;
}

Recognition recognize(std::span<const TrainedModel> bank, const Sequence& seq) {
  for (const auto& m : bank)
    if (m.kind() != ModelKind::hsmm)
      throw Error(ErrorCode::InvalidArgument, "bank mixes model kinds");
  return ihsmm::recognize(bank, seq);
}

}  // namespace ihsmm::hsmm
