#include "ihsmm/ilp_hsmm.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "estimate.hpp"
#include "ihsmm/errors.hpp"
#include "ihsmm/logmath.hpp"
#include "ihsmm/random.hpp"

namespace ihsmm::ilp {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

double gaussian_pdf(double x, double mu, double sigma) {
  const double z = (x - mu) / sigma;
  return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * std::numbers::pi));
}

IntervalGaussian make_interval(double mu, double sigma, double delta_pt, bool observed) {
  IntervalGaussian g{mu, sigma, mu, mu, observed};
  const double peak = 1.0 / (sigma * std::sqrt(2.0 * std::numbers::pi));
  if (delta_pt < peak) {
    const double w = sigma * std::sqrt(2.0 * std::log(peak / delta_pt));
    g.lo = mu - w;
    g.hi = mu + w;
  }
  return g;
}

double out_of_range_density(const IlpParams& params) {
  const std::size_t M = params.base.M;
  double lowest = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < M; ++i)
    for (std::size_t j = 0; j < M; ++j) {
      if (i == j) continue;
      const auto& g = params.interval(i, j);
      const double a = std::max(0.0, std::ceil(g.lo)), b = std::floor(g.hi);
      if (a > b) continue;
      // unimodal: the smallest value on the grid sits at one of its ends
      lowest = std::min({lowest, gaussian_pdf(a, g.mu, g.sigma), gaussian_pdf(b, g.mu, g.sigma)});
    }
  if (!std::isfinite(lowest)) lowest = params.delta_pt;
  return params.c * lowest;
}

double interval_pdf(const IntervalGaussian& g, double l, const IlpParams& params) {
  if (l >= g.lo && l <= g.hi) return gaussian_pdf(l, g.mu, g.sigma);
  return out_of_range_density(params);
}

IntervalPrior interval_prior(std::span<const std::size_t> gaps, double sigma_min) {
  IntervalPrior prior{0.0, sigma_min};
  if (gaps.empty()) return prior;
  double sum = 0.0;
  for (auto g : gaps) sum += static_cast<double>(g);
  prior.mu = sum / static_cast<double>(gaps.size());
  double ss = 0.0;
  for (auto g : gaps) ss += (static_cast<double>(g) - prior.mu) * (static_cast<double>(g) - prior.mu);
  const double sd = gaps.size() > 1 ? std::sqrt(ss / static_cast<double>(gaps.size() - 1)) : 0.0;
  prior.sigma = std::max(3.0 * sd, sigma_min);
  return prior;
}

std::vector<IntervalGaussian> fit_interval_stats(std::span<const GapObservation> observations,
                                                 std::size_t M, const IntervalPrior& prior,
                                                 double delta_pt, double sigma_min) {
  std::vector<std::vector<double>> by_pair(M * M);
  for (const auto& o : observations) {
    if (o.from >= M || o.to >= M) throw Error(ErrorCode::InvalidArgument, "state out of range");
    by_pair[o.from * M + o.to].push_back(static_cast<double>(o.gap));
  }
  std::vector<IntervalGaussian> L;
  L.reserve(M * M);
  for (const auto& xs : by_pair) {
    if (xs.empty()) {
      L.push_back(make_interval(prior.mu, std::max(prior.sigma, sigma_min), delta_pt, false));
      continue;
    }
    double sum = 0.0;
    for (double x : xs) sum += x;
    const double mu = sum / static_cast<double>(xs.size());
    double ss = 0.0;
    for (double x : xs) ss += (x - mu) * (x - mu);
    const double sd = xs.size() > 1 ? std::sqrt(ss / static_cast<double>(xs.size() - 1)) : 0.0;
    L.push_back(make_interval(mu, std::max(sd, sigma_min), delta_pt, true));
  }
  return L;
}

std::vector<GapObservation> gap_observations(std::span<const LatticeInput> inputs,
                                             std::span<const Decoding> paths) {
  std::vector<GapObservation> out;
  for (std::size_t n = 0; n < inputs.size() && n < paths.size(); ++n) {
    const auto& path = paths[n].path;
    for (std::size_t k = 1; k < path.size(); ++k) {
      const std::size_t gap = inputs[n].gap_before[path[k].start];
      if (gap > 0) out.push_back({path[k - 1].state, path[k].state, gap});
    }
  }
  return out;
}

IntervalModel::IntervalModel(const IlpParams& params)
    : hsmm::BaseModel(params.base), ilp_(&params), out_of_range_(out_of_range_density(params)) {}

double IntervalModel::density(std::size_t i, std::size_t j, std::size_t gap) const {
  const auto& g = ilp_->interval(i, j);
  const auto l = static_cast<double>(gap);
  if (l >= g.lo && l <= g.hi) return gaussian_pdf(l, g.mu, g.sigma);
  return out_of_range_;
}

const MatrixXd& IntervalModel::transition(std::size_t gap, MatrixXd& scratch) const {
  if (gap == 0) return params_->A;
  const std::size_t M = params_->M;
  const auto D = static_cast<Index>(params_->Dmax);
  scratch = params_->A;
  for (std::size_t i = 0; i < M; ++i)
    for (std::size_t j = 0; j < M; ++j)
      if (i != j) scratch.block(static_cast<Index>(i) * D, static_cast<Index>(j) * D, D, D) *= density(i, j, gap);
  return scratch;
}

const MatrixXd& IntervalModel::log_transition(std::size_t gap, MatrixXd& scratch) const {
  if (gap == 0) return log_a_;
  const std::size_t M = params_->M;
  const auto D = static_cast<Index>(params_->Dmax);
  scratch = log_a_;
  for (std::size_t i = 0; i < M; ++i)
    for (std::size_t j = 0; j < M; ++j)
      if (i != j)
        scratch.block(static_cast<Index>(i) * D, static_cast<Index>(j) * D, D, D).array() +=
            safe_log(density(i, j, gap));
  return scratch;
}

IlpParams init_params(std::size_t M, std::size_t N, std::size_t Dmax, std::uint64_t seed,
                      const IntervalPrior& prior, double delta_pt, double c, double sigma_min) {
  IlpParams p;
  p.base = hsmm::init_params(M, N, Dmax, seed);
  p.delta_pt = delta_pt;
  p.c = c;
  p.sigma_min = sigma_min;
  p.L.assign(M * M, make_interval(prior.mu, std::max(prior.sigma, sigma_min), delta_pt, false));
  return p;
}

namespace {

LatticeInput checked_input(const IntervalModel& model, const IlpParams& params, const Sequence& seq,
                           LengthMode mode) {
  detail::check_symbols(seq, params.base.N);
  LatticeInput in = stripped_input(seq);
  detail::check_length(model, in, mode);
  return in;
}

class CountSink : public PosteriorSink {
 public:
  explicit CountSink(hsmm::Counts& counts) : counts_(counts) {}
  void initial(std::size_t, const VectorXd& posterior) override { counts_.initial += posterior; }
  void transition(std::size_t, const MatrixXd& posterior) override { counts_.transition += posterior; }

 private:
  hsmm::Counts& counts_;
};

std::pair<hsmm::Counts, double> estep(const IlpParams& params, std::span<const LatticeInput> inputs) {
  IntervalModel model(params);
  hsmm::Counts counts(params.base.super_states(), params.base.M, params.base.N);
  CountSink sink(counts);
  std::size_t finite = 0;
  for (const auto& in : inputs) {
    const Lattice lat = ihsmm::forward_backward(model, in);
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

Decoding viterbi_ilp(const IlpParams& params, const Sequence& seq, LengthMode mode) {
  IntervalModel model(params);
  Decoding dec = ihsmm::viterbi(model, checked_input(model, params, seq, mode));
  if (dec.log_score == kNegInf) throw Error(ErrorCode::ImpossibleSequence, "no path has positive score");
  return dec;
}

Lattice forward_ilp(const IlpParams& params, const Sequence& seq, LengthMode mode) {
  IntervalModel model(params);
  return ihsmm::forward(model, checked_input(model, params, seq, mode));
}

double score(const IlpParams& params, const Sequence& seq, IlpScore criterion, LengthMode mode) {
  IntervalModel model(params);
  const LatticeInput in = checked_input(model, params, seq, mode);
  if (criterion == IlpScore::forward) return ihsmm::forward(model, in).log_likelihood;
  return ihsmm::viterbi(model, in).log_score;
}

double log_likelihood(const IlpParams& params, std::span<const Sequence> batch, LengthMode mode) {
  double total = 0.0;
  for (const auto& seq : batch) {
    const double ll = forward_ilp(params, seq, mode).log_likelihood;
    if (std::isfinite(ll)) total += ll;
  }
  return total;
}

TrainedModel train_ilp(std::span<const Sequence> sequences, std::size_t N, std::size_t M,
                       std::size_t Dmax, const TrainConfig& config, const IterationObserver& observer) {
  config.validate();
  if (sequences.empty()) throw Error(ErrorCode::InvalidArgument, "no training sequences");

  std::vector<std::size_t> gaps;
  for (const auto& seq : sequences) {
    detail::check_symbols(seq, N);
    const LatticeInput in = stripped_input(seq);
    for (std::size_t t = 1; t < in.length(); ++t)
      if (in.gap_before[t] > 0) gaps.push_back(in.gap_before[t]);
  }
  const IntervalPrior prior = interval_prior(gaps, config.sigma_min);
  IlpParams params = init_params(M, N, Dmax, config.seed, prior, config.delta_pt, config.c, config.sigma_min);

  std::vector<LatticeInput> inputs;
  {
    IntervalModel model(params);
    for (const auto& seq : sequences) inputs.push_back(checked_input(model, params, seq, config.length_mode));
  }

  auto [counts, theta] = estep(params, inputs);
  if (!std::isfinite(theta)) throw Error(ErrorCode::DegenerateLattice, "every training sequence has zero likelihood");
  TrainedModel out;
  out.history.push_back(theta);
  for (std::size_t h = 1; h <= config.max_iters; ++h) {
    IlpParams cand = params;
    cand.base = hsmm::maximize(params.base, counts, config.kappa);
    auto [cand_counts, cand_theta] = estep(cand, inputs);
    if (!std::isfinite(cand_theta))
      throw Error(ErrorCode::DegenerateLattice, "every training sequence has zero likelihood");

    // refit the interval densities on the best paths; keep them only if the
    // objective does not drop
    std::vector<Decoding> paths;
    {
      IntervalModel model(cand);
      for (const auto& in : inputs) paths.push_back(ihsmm::viterbi(model, in));
    }
    IlpParams refit = cand;
    refit.L = fit_interval_stats(gap_observations(inputs, paths), M, prior, config.delta_pt, config.sigma_min);
    if (refit.L != cand.L) {
      auto [refit_counts, refit_theta] = estep(refit, inputs);
      if (refit_theta >= cand_theta) {
        cand = std::move(refit);
        cand_counts = std::move(refit_counts);
        cand_theta = refit_theta;
      }
    }

    const double delta = cand_theta - theta;
    params = std::move(cand);
    counts = std::move(cand_counts);
    theta = cand_theta;
    out.history.push_back(theta);
    out.iterations = h;
    if (observer) {
      const ModelParams snapshot = params;
      observer(IterationInfo{h, theta, delta, snapshot});
    }
    if (delta < config.epsilon) break;
  }
  out.params = std::move(params);
  out.log_likelihood = theta;
  out.config = config;
  return out;
}

Sequence generate(const IlpParams& params, std::size_t length, GenerateMode mode, std::uint64_t seed) {
  Rng rng(seed);
  const bool greedy = mode == GenerateMode::most_likely;
  const HsmmParams& base = params.base;
  auto pick = [&](const VectorXd& w) -> Index {
    if (greedy) return detail::argmax(w);
    return static_cast<Index>(rng.categorical({w.data(), static_cast<std::size_t>(w.size())}));
  };
  MatrixXd emit = base.B;
  if (emit.cols() > 1) emit.col(SymbolTable::kInterval).setZero();

  Sequence out;
  if (length == 0) return out;
  const auto D = static_cast<Index>(base.Dmax);
  Index k = pick(base.pi);
  while (out.obs.size() < length) {
    const Index j = k / D, d = k % D + 1;
    for (Index t = 0; t < d && out.obs.size() < length; ++t)
      out.obs.push_back(static_cast<SymbolId>(pick(emit.row(j).transpose())));
    if (out.obs.size() >= length) break;
    if (base.M == 1) {
      out.obs.resize(length, SymbolTable::kInterval);
      break;
    }
    const Index next = pick(base.A.row(k).transpose());
    const auto& g = params.interval(static_cast<std::size_t>(j), static_cast<std::size_t>(next / D));
    if (g.observed) {
      const double lo = std::max(0.0, std::ceil(g.lo)), hi = std::max(lo, std::floor(g.hi));
      const double raw = greedy ? std::round(g.mu) : std::round(rng.normal(g.mu, g.sigma));
      const auto gap = static_cast<std::size_t>(std::clamp(raw, lo, hi));
      for (std::size_t t = 0; t < gap && out.obs.size() < length; ++t) out.obs.push_back(SymbolTable::kInterval);
    }
    k = next;
  }
  return out;
}

Recognition recognize_ilp(std::span<const TrainedModel> bank, const Sequence& seq) {
  for (const auto& m : bank)
    if (m.kind() != ModelKind::ilp_hsmm)
      throw Error(ErrorCode::InvalidArgument, "bank mixes model kinds");
  return ihsmm::recognize(bank, seq);
}

}  // namespace ihsmm::ilp
