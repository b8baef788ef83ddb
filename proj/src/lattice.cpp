#include "ihsmm/lattice.hpp"

#include <algorithm>
#include <cmath>

#include "ihsmm/errors.hpp"
#include "ihsmm/logmath.hpp"

namespace ihsmm {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

std::vector<std::size_t> LatticeInput::block_lengths() const {
  std::vector<std::size_t> out;
  for (std::size_t t = 0; t < obs.size(); ++t) {
    if (t == 0 || gap_before[t] > 0)
      out.push_back(1);
    else
      ++out.back();
  }
  return out;
}

LatticeInput filled_input(const Sequence& seq) {
  LatticeInput in;
  in.obs = seq.obs;
  in.gap_before.assign(seq.obs.size(), 0);
  return in;
}

LatticeInput stripped_input(const Sequence& seq) {
  LatticeInput in;
  std::size_t gap = 0;
  for (SymbolId s : seq.obs) {
    if (s == SymbolTable::kInterval) {
      ++gap;
      continue;
    }
    in.obs.push_back(s);
    in.gap_before.push_back(gap);
    gap = 0;
  }
  in.trailing_gap = gap;
  return in;
}

const MatrixXd& SegmentModel::log_transition(std::size_t gap, MatrixXd& scratch) const {
  MatrixXd tmp;
  const MatrixXd& t = transition(gap, tmp);
  scratch = log_exact(t.array());
  return scratch;
}

std::vector<VectorXd> segment_scores(const SegmentModel& model, const LatticeInput& in) {
  const std::size_t T = in.length(), M = model.states(), D = model.max_duration();
  const auto S = static_cast<Index>(M * D);
  std::vector<VectorXd> seg(T + 1, VectorXd::Constant(S, kNegInf));
  for (std::size_t e = 1; e <= T; ++e) {
    for (std::size_t j = 0; j < M; ++j) {
      double acc = 0.0;
      for (std::size_t d = 1; d <= D && d <= e; ++d) {
        const std::size_t t = e - d;
        if (d > 1 && in.gap_before[t + 1] > 0) break;
        acc += model.log_emission(j, in.obs[t]);
        seg[e](static_cast<Index>(j * D + d - 1)) = acc;
      }
    }
  }
  return seg;
}

bool coverable(const SegmentModel& model, const LatticeInput& in) {
  if (model.states() > 1) return true;
  for (std::size_t len : in.block_lengths())
    if (len > model.max_duration()) return false;
  return true;
}

namespace {

VectorXd log_vector(const VectorXd& v) { return log_exact(v.array()); }

void forward_pass(const SegmentModel& model, const LatticeInput& in,
                  const std::vector<VectorXd>& seg, Lattice& lat) {
  const std::size_t T = in.length(), M = model.states(), D = model.max_duration();
  const auto S = static_cast<Index>(M * D);
  lat.alpha.assign(T + 1, VectorXd::Constant(S, kNegInf));
  MatrixXd scratch;
  VectorXd entry(S);
  for (std::size_t s = 0; s < T; ++s) {
    if (s == 0) {
      entry = log_vector(model.initial(in.gap_before[0]));
    } else {
      const double m = lat.alpha[s].maxCoeff();
      if (m == kNegInf) continue;
      const MatrixXd& tr = model.transition(in.gap_before[s], scratch);
      const VectorXd p = exp_exact(lat.alpha[s].array() - m);
      entry = log_exact((tr.transpose() * p).array()) + m;
    }
    for (std::size_t j = 0; j < M; ++j)
      for (std::size_t d = 1; d <= D && s + d <= T; ++d) {
        const auto k = static_cast<Index>(j * D + d - 1);
        lat.alpha[s + d](k) = entry(k) + seg[s + d](k);
      }
  }
  lat.log_likelihood = log_sum_exp(std::span<const double>(lat.alpha[T].data(), lat.alpha[T].size()));
}

/// w(k) = seg + beta of the segment in super state k starting at s.
VectorXd continuation(const LatticeInput& in, std::size_t M, std::size_t D,
                      const std::vector<VectorXd>& seg, const Lattice& lat, std::size_t s) {
  const std::size_t T = in.length();
  VectorXd w = VectorXd::Constant(static_cast<Index>(M * D), kNegInf);
  for (std::size_t j = 0; j < M; ++j)
    for (std::size_t d = 1; d <= D && s + d <= T; ++d) {
      const auto k = static_cast<Index>(j * D + d - 1);
      w(k) = seg[s + d](k) + lat.beta[s + d](k);
    }
  return w;
}

void backward_pass(const SegmentModel& model, const LatticeInput& in,
                   const std::vector<VectorXd>& seg, Lattice& lat) {
  const std::size_t T = in.length(), M = model.states(), D = model.max_duration();
  const auto S = static_cast<Index>(M * D);
  lat.beta.assign(T + 1, VectorXd::Constant(S, kNegInf));
  lat.beta[T].setZero();
  MatrixXd scratch;
  for (std::size_t s = T - 1; s >= 1; --s) {
    const VectorXd w = continuation(in, M, D, seg, lat, s);
    const double m = w.maxCoeff();
    if (m == kNegInf) continue;
    const MatrixXd& tr = model.transition(in.gap_before[s], scratch);
    const VectorXd p = exp_exact(w.array() - m);
    lat.beta[s] = log_exact((tr * p).array()) + m;
  }
}

Lattice empty_lattice(std::size_t S) {
  Lattice lat;
  lat.alpha.assign(1, VectorXd::Constant(static_cast<Index>(S), kNegInf));
  lat.beta.assign(1, VectorXd::Zero(static_cast<Index>(S)));
  lat.log_likelihood = 0.0;
  return lat;
}

}  // namespace

Lattice forward(const SegmentModel& model, const LatticeInput& in) {
  if (in.length() == 0) return empty_lattice(model.super_states());
  Lattice lat;
  forward_pass(model, in, segment_scores(model, in), lat);
  return lat;
}

Lattice forward_backward(const SegmentModel& model, const LatticeInput& in) {
  if (in.length() == 0) return empty_lattice(model.super_states());
  Lattice lat;
  const auto seg = segment_scores(model, in);
  forward_pass(model, in, seg, lat);
  backward_pass(model, in, seg, lat);
  return lat;
}

std::vector<double> coverage_log_mass(const SegmentModel& model, const LatticeInput& in,
                                      const Lattice& lattice) {
  const std::size_t T = in.length(), M = model.states(), D = model.max_duration();
  std::vector<double> out(T, kNegInf);
  for (std::size_t e = 1; e <= T; ++e)
    for (std::size_t j = 0; j < M; ++j)
      for (std::size_t d = 1; d <= D && d <= e; ++d) {
        const auto k = static_cast<Index>(j * D + d - 1);
        const double v = lattice.alpha[e](k) + lattice.beta[e](k);
        if (v == kNegInf) continue;
        for (std::size_t t = e - d; t < e; ++t) out[t] = log_add(out[t], v);
      }
  return out;
}

void accumulate_posteriors(const SegmentModel& model, const LatticeInput& in,
                           const Lattice& lattice, MatrixXd& emission, PosteriorSink& sink) {
  const std::size_t T = in.length(), M = model.states(), D = model.max_duration();
  const double ll = lattice.log_likelihood;
  if (!std::isfinite(ll)) throw Error(ErrorCode::DegenerateLattice, "posteriors of an impossible sequence");
  if (T == 0) return;
  const auto seg = segment_scores(model, in);

  for (std::size_t e = 1; e <= T; ++e)
    for (std::size_t j = 0; j < M; ++j)
      for (std::size_t d = 1; d <= D && d <= e; ++d) {
        const auto k = static_cast<Index>(j * D + d - 1);
        const double v = lattice.alpha[e](k) + lattice.beta[e](k);
        if (v == kNegInf) continue;
        const double p = std::exp(v - ll);
        for (std::size_t t = e - d; t < e; ++t) emission(static_cast<Index>(j), in.obs[t]) += p;
      }

  const VectorXd w0 = continuation(in, M, D, seg, lattice, 0);
  const VectorXd first = (log_vector(model.initial(in.gap_before[0])) + w0).array() - ll;
  sink.initial(in.gap_before[0], exp_exact(first.array()).matrix());

  MatrixXd scratch;
  for (std::size_t s = 1; s < T; ++s) {
    if (lattice.alpha[s].maxCoeff() == kNegInf) continue;
    const VectorXd w = continuation(in, M, D, seg, lattice, s);
    if (w.maxCoeff() == kNegInf) continue;
    const MatrixXd& lt = model.log_transition(in.gap_before[s], scratch);
    MatrixXd xi = lt;
    xi.colwise() += lattice.alpha[s];
    xi.rowwise() += w.transpose();
    xi = exp_exact(xi.array() - ll);
    sink.transition(in.gap_before[s], xi);
  }
}

Decoding viterbi(const SegmentModel& model, const LatticeInput& in) {
  const std::size_t T = in.length(), M = model.states(), D = model.max_duration();
  const auto S = static_cast<Index>(M * D);
  Decoding out;
  if (T == 0) return out;
  const auto seg = segment_scores(model, in);
  std::vector<VectorXd> delta(T + 1, VectorXd::Constant(S, kNegInf));
  std::vector<std::vector<Index>> back(T + 1, std::vector<Index>(static_cast<std::size_t>(S), -1));
  MatrixXd scratch;
  VectorXd entry(S);
  std::vector<Index> arg(static_cast<std::size_t>(S), -1);
  for (std::size_t s = 0; s < T; ++s) {
    if (s == 0) {
      entry = log_vector(model.initial(in.gap_before[0]));
      std::fill(arg.begin(), arg.end(), -1);
    } else {
      if (delta[s].maxCoeff() == kNegInf) continue;
      const MatrixXd& lt = model.log_transition(in.gap_before[s], scratch);
      for (Index k = 0; k < S; ++k) {
        double best = kNegInf;
        Index bi = -1;
        for (Index p = 0; p < S; ++p) {
          const double v = delta[s](p) + lt(p, k);
          if (v > best) {
            best = v;
            bi = p;
          }
        }
        entry(k) = best;
        arg[static_cast<std::size_t>(k)] = bi;
      }
    }
    for (std::size_t j = 0; j < M; ++j)
      for (std::size_t d = 1; d <= D && s + d <= T; ++d) {
        const auto k = static_cast<Index>(j * D + d - 1);
        delta[s + d](k) = entry(k) + seg[s + d](k);
        back[s + d][static_cast<std::size_t>(k)] = arg[static_cast<std::size_t>(k)];
      }
  }
  Index k = -1;
  double best = kNegInf;
  for (Index c = 0; c < S; ++c)
    if (delta[T](c) > best) {
      best = delta[T](c);
      k = c;
    }
  out.log_score = best;
  if (k < 0) return out;
  std::size_t e = T;
  while (true) {
    const auto j = static_cast<std::size_t>(k) / D;
    const auto d = static_cast<std::size_t>(k) % D + 1;
    out.path.push_back({j, d, e - d});
    const Index prev = back[e][static_cast<std::size_t>(k)];
    e -= d;
    if (e == 0 || prev < 0) break;
    k = prev;
  }
  std::reverse(out.path.begin(), out.path.end());
  return out;
}

}  // namespace ihsmm
