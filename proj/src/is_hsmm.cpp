#include "ihsmm/is_hsmm.hpp"

#include "estimate.hpp"
#include "ihsmm/errors.hpp"
#include "ihsmm/logmath.hpp"
#include "ihsmm/random.hpp"

namespace ihsmm::is {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

IsHsmmParams init_params(std::size_t M, std::size_t N, std::size_t Dmax, std::size_t Dmax_int,
                         std::uint64_t seed) {
  if (Dmax_int == 0) throw Error(ErrorCode::InvalidDims, "Dmax_int must be positive");
  IsHsmmParams p;
  p.base = hsmm::init_params(M, N, Dmax, seed);
  p.Dmax_int = Dmax_int;
  const auto S = static_cast<Index>(M * Dmax), G = static_cast<Index>(Dmax_int);
  for (std::size_t b = 0; b < Dmax_int; ++b)
    p.bridge.push_back(detail::uniform_rows(S, S, static_cast<Index>(Dmax)));
  p.bridge_start = detail::uniform_rows(G, S);
  p.gap_choice = detail::uniform_rows(S, G + 1);
  p.gap_choice_start = VectorXd::Constant(G + 1, 1.0 / static_cast<double>(G + 1));
  return p;
}

VectorXd bucket_given_gap(const VectorXd& choice_row) {
  const Index G = choice_row.size() - 1;
  VectorXd out = choice_row.tail(G);
  const double total = out.sum();
  if (total > 0.0) return out / total;
  return VectorXd::Constant(G, 1.0 / static_cast<double>(G));
}

BridgeModel::BridgeModel(const IsHsmmParams& params) : hsmm::BaseModel(params.base), is_(&params) {
  const auto S = static_cast<Index>(params.base.super_states());
  MatrixXd given(S, static_cast<Index>(params.Dmax_int));
  for (Index k = 0; k < S; ++k) given.row(k) = bucket_given_gap(params.gap_choice.row(k).transpose()).transpose();
  const VectorXd start_given = bucket_given_gap(params.gap_choice_start);
  for (std::size_t b = 0; b < params.Dmax_int; ++b) {
    const auto c = static_cast<Index>(b);
    start_rows_.push_back(params.bridge_start.row(c).transpose() * start_given(c));
    bridge_.push_back(given.col(c).asDiagonal() * params.bridge[b]);
    log_bridge_.push_back(log_exact(bridge_.back().array()));
  }
}

const VectorXd& BridgeModel::initial(std::size_t leading_gap) const {
  if (leading_gap == 0) return params_->pi;
  return start_rows_[is_->bucket(leading_gap) - 1];
}

const MatrixXd& BridgeModel::transition(std::size_t gap, MatrixXd&) const {
  if (gap == 0) return params_->A;
  return bridge_[is_->bucket(gap) - 1];
}

const MatrixXd& BridgeModel::log_transition(std::size_t gap, MatrixXd&) const {
  if (gap == 0) return log_a_;
  return log_bridge_[is_->bucket(gap) - 1];
}

namespace {

LatticeInput checked_input(const BridgeModel& model, const IsHsmmParams& params,
                           const Sequence& seq, LengthMode mode) {
  detail::check_symbols(seq, params.base.N);
  LatticeInput in = stripped_input(seq);
  detail::check_length(model, in, mode);
  return in;
}

struct IsCounts {
  hsmm::Counts base;
  std::vector<MatrixXd> bridge;
  MatrixXd start;
  MatrixXd gap_choice;
  VectorXd gap_choice_start;

  explicit IsCounts(const IsHsmmParams& p)
      : base(p.base.super_states(), p.base.M, p.base.N),
        bridge(p.Dmax_int, MatrixXd::Zero(static_cast<Index>(p.base.super_states()),
                                          static_cast<Index>(p.base.super_states()))),
        start(MatrixXd::Zero(static_cast<Index>(p.Dmax_int), static_cast<Index>(p.base.super_states()))),
        gap_choice(MatrixXd::Zero(static_cast<Index>(p.base.super_states()), static_cast<Index>(p.Dmax_int + 1))),
        gap_choice_start(VectorXd::Zero(static_cast<Index>(p.Dmax_int + 1))) {}
};

class BridgeSink : public PosteriorSink {
 public:
  BridgeSink(const IsHsmmParams& params, IsCounts& counts) : params_(params), counts_(counts) {}

  void initial(std::size_t lead, const VectorXd& posterior) override {
    const auto b = static_cast<Index>(params_.bucket(lead));
    if (b == 0)
      counts_.base.initial += posterior;
    else
      counts_.start.row(b - 1) += posterior.transpose();
    counts_.gap_choice_start(b) += posterior.sum();
  }

  void transition(std::size_t gap, const MatrixXd& posterior) override {
    const auto b = static_cast<Index>(params_.bucket(gap));
    if (b == 0)
      counts_.base.transition += posterior;
    else
      counts_.bridge[static_cast<std::size_t>(b - 1)] += posterior;
    counts_.gap_choice.col(b) += posterior.rowwise().sum();
  }

 private:
  const IsHsmmParams& params_;
  IsCounts& counts_;
};

std::pair<IsCounts, double> estep(const IsHsmmParams& params, std::span<const Sequence> batch,
                                  LengthMode mode) {
  BridgeModel model(params);
  IsCounts counts(params);
  BridgeSink sink(params, counts);
  std::size_t finite = 0;
  for (const auto& seq : batch) {
    const LatticeInput in = checked_input(model, params, seq, mode);
    const Lattice lat = ihsmm::forward_backward(model, in);
    if (!std::isfinite(lat.log_likelihood)) {
      ++counts.base.impossible;
      continue;
    }
    ++finite;
    counts.base.log_likelihood += lat.log_likelihood;
    accumulate_posteriors(model, in, lat, counts.base.emission, sink);
  }
  const double ll = finite ? counts.base.log_likelihood : kNegInf;
  return {std::move(counts), ll};
}

IsHsmmParams maximize(const IsHsmmParams& params, const IsCounts& counts, double kappa) {
  IsHsmmParams out = params;
  out.base = hsmm::maximize(params.base, counts.base, kappa);
  for (std::size_t b = 0; b < params.Dmax_int; ++b)
    detail::update_rows(out.bridge[b], counts.bridge[b], kappa, static_cast<Index>(params.base.Dmax));
  detail::update_rows(out.bridge_start, counts.start, kappa);
  detail::update_rows(out.gap_choice, counts.gap_choice, kappa);
  if (auto g = detail::normalize_counts(counts.gap_choice_start, kappa)) out.gap_choice_start = *g;
  return out;
}

}  // namespace

Lattice forward_is(const IsHsmmParams& params, const Sequence& seq, LengthMode mode) {
  BridgeModel model(params);
  return ihsmm::forward(model, checked_input(model, params, seq, mode));
}

Lattice backward_is(const IsHsmmParams& params, const Sequence& seq, LengthMode mode) {
  return forward_backward_is(params, seq, mode);
}

Lattice forward_backward_is(const IsHsmmParams& params, const Sequence& seq, LengthMode mode) {
  BridgeModel model(params);
  return ihsmm::forward_backward(model, checked_input(model, params, seq, mode));
}

double log_likelihood(const IsHsmmParams& params, std::span<const Sequence> batch, LengthMode mode) {
  double total = 0.0;
  for (const auto& seq : batch) {
    const double ll = forward_is(params, seq, mode).log_likelihood;
    if (std::isfinite(ll)) total += ll;
  }
  return total;
}

IsHsmmParams reestimate(const IsHsmmParams& params, std::span<const Sequence> batch, double kappa,
                        double* log_likelihood) {
  auto [counts, ll] = estep(params, batch, LengthMode::clamp);
  if (!std::isfinite(ll)) throw Error(ErrorCode::DegenerateLattice, "every sequence has zero likelihood");
  if (log_likelihood) *log_likelihood = ll;
  return maximize(params, counts, kappa);
}

TrainedModel train_is(std::span<const Sequence> sequences, std::size_t N, std::size_t M,
                      std::size_t Dmax, const TrainConfig& config, const IterationObserver& observer) {
  config.validate();
  if (sequences.empty()) throw Error(ErrorCode::InvalidArgument, "no training sequences");
  IsHsmmParams params = init_params(M, N, Dmax, config.max_interval, config.seed);
  auto res = detail::run_em(
      params, [&](const IsHsmmParams& p) { return estep(p, sequences, config.length_mode); },
      [&](const IsHsmmParams& p, const IsCounts& c) { return maximize(p, c, config.kappa); }, config,
      observer);
  return TrainedModel{.label = {}, .params = std::move(params), .log_likelihood = res.log_likelihood,
                      .iterations = res.iterations, .config = config, .alphabet = {},
                      .history = std::move(res.history)};
}

MatrixXd transition_occupancy(const IsHsmmParams& params, std::span<const Sequence> batch) {
  const auto [counts, ll] = estep(params, batch, LengthMode::clamp);
  (void)ll;
  MatrixXd total = counts.base.transition;
  for (const auto& b : counts.bridge) total += b;
  const auto M = static_cast<Index>(params.base.M), D = static_cast<Index>(params.base.Dmax);
  MatrixXd occ = MatrixXd::Zero(M, M);
  for (Index i = 0; i < M; ++i)
    for (Index j = 0; j < M; ++j) occ(i, j) = total.block(i * D, j * D, D, D).sum();
  return occ;
}

Sequence generate(const IsHsmmParams& params, std::size_t length, GenerateMode mode,
                  std::uint64_t seed) {
  Rng rng(seed);
  const bool greedy = mode == GenerateMode::most_likely;
  const HsmmParams& base = params.base;
  auto pick = [&](const VectorXd& w) -> Index {
    if (greedy) return detail::argmax(w);
    return static_cast<Index>(rng.categorical({w.data(), static_cast<std::size_t>(w.size())}));
  };
  // ordinary states never emit the interval symbol
  MatrixXd emit = base.B;
  if (emit.cols() > 1) emit.col(SymbolTable::kInterval).setZero();

  Sequence out;
  if (length == 0) return out;
  auto emit_gap = [&](Index bucket) {
    for (Index t = 0; t < bucket && out.obs.size() < length; ++t) out.obs.push_back(SymbolTable::kInterval);
  };
  const auto D = static_cast<Index>(base.Dmax);
  Index b = pick(params.gap_choice_start);
  emit_gap(b);
  Index k = pick(b == 0 ? base.pi : VectorXd(params.bridge_start.row(b - 1).transpose()));
  while (out.obs.size() < length) {
    const Index j = k / D, d = k % D + 1;
    for (Index t = 0; t < d && out.obs.size() < length; ++t)
      out.obs.push_back(static_cast<SymbolId>(pick(emit.row(j).transpose())));
    if (out.obs.size() >= length) break;
    if (base.M == 1) {
      out.obs.resize(length, SymbolTable::kInterval);
      break;
    }
    b = pick(params.gap_choice.row(k).transpose());
    emit_gap(b);
    const MatrixXd& next = b == 0 ? base.A : params.bridge[static_cast<std::size_t>(b - 1)];
    k = pick(next.row(k).transpose());
  }
  return out;
}

Recognition recognize_is(std::span<const TrainedModel> bank, const Sequence& seq) {
  for (const auto& m : bank)
    if (m.kind() != ModelKind::is_hsmm)
      throw Error(ErrorCode::InvalidArgument, "bank mixes model kinds");
  return ihsmm::recognize(bank, seq);
}

}  // namespace ihsmm::is
