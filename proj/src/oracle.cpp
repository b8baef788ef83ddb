#include "ihsmm/oracle.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include "ihsmm/errors.hpp"

namespace ihsmm::oracle {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// The observed ticks and the number of interval ticks right before each.
struct Ticks {
  std::vector<SymbolId> obs;
  std::vector<std::size_t> gap;
};

Ticks ticks_of(const Sequence& seq, bool strip) {
  Ticks out;
  std::size_t pending = 0;
  for (SymbolId s : seq.obs) {
    if (strip && s == SymbolTable::kInterval) {
      ++pending;
      continue;
    }
    out.obs.push_back(s);
    out.gap.push_back(pending);
    pending = 0;
  }
  return out;
}

using Path = std::vector<DecodedSegment>;

// Visits every segmentation (durations lexicographic) and, for each, every
// labelling with distinct neighbouring states (lexicographic).
void enumerate(const Ticks& ticks, std::size_t M, std::size_t Dmax,
               const std::function<void(const Path&)>& visit) {
  if (M == 0 || Dmax == 0) throw Error(ErrorCode::InvalidDims, "empty state space");
  const std::size_t T = ticks.obs.size();
  if (T == 0) {
    visit({});
    return;
  }
  std::size_t visited = 0;
  std::vector<std::size_t> durations;
  Path path;

  std::function<void(std::size_t)> label = [&](std::size_t k) {
    if (k == durations.size()) {
      if (++visited > kMaxPaths) throw Error(ErrorCode::TooLarge, "more than 1e7 paths");
      visit(path);
      return;
    }
    for (std::size_t s = 0; s < M; ++s) {
      if (k > 0 && path[k - 1].state == s) continue;
      path[k].state = s;
      label(k + 1);
    }
  };

  std::function<void(std::size_t)> split = [&](std::size_t pos) {
    if (pos == T) {
      path.assign(durations.size(), DecodedSegment{0, 0, 0});
      std::size_t start = 0;
      for (std::size_t k = 0; k < durations.size(); ++k) {
        path[k].duration = durations[k];
        path[k].start = start;
        start += durations[k];
      }
      label(0);
      return;
    }
    for (std::size_t d = 1; d <= Dmax && pos + d <= T; ++d) {
      if (d > 1 && ticks.gap[pos + d - 1] > 0) break;
      durations.push_back(d);
      split(pos + d);
      durations.pop_back();
    }
  };
  split(0);
}

double lg(double x) { return x > 0.0 ? std::log(x) : kNegInf; }

double emissions(const HsmmParams& p, const Ticks& ticks, const DecodedSegment& seg) {
  double acc = 0.0;
  for (std::size_t t = seg.start; t < seg.start + seg.duration; ++t)
    acc += lg(p.B(static_cast<Eigen::Index>(seg.state), ticks.obs[t]));
  return acc;
}

Eigen::Index flat(const HsmmParams& p, const DecodedSegment& seg) {
  return static_cast<Eigen::Index>(seg.state * p.Dmax + seg.duration - 1);
}

// Boundary factor between consecutive segments separated by gap ticks.
using BoundaryFn = std::function<double(const DecodedSegment&, const DecodedSegment&, std::size_t)>;
using StartFn = std::function<double(const DecodedSegment&)>;

double score_path(const HsmmParams& p, const Ticks& ticks, const Path& path, const StartFn& start,
                  const BoundaryFn& boundary) {
  if (path.empty()) return 0.0;
  double s = start(path[0]) + emissions(p, ticks, path[0]);
  for (std::size_t k = 1; k < path.size(); ++k)
    s += boundary(path[k - 1], path[k], ticks.gap[path[k].start]) + emissions(p, ticks, path[k]);
  return s;
}

double sum_paths(const HsmmParams& p, const Ticks& ticks, const StartFn& start, const BoundaryFn& boundary) {
  double total = 0.0;
  enumerate(ticks, p.M, p.Dmax, [&](const Path& path) {
    total += std::exp(score_path(p, ticks, path, start, boundary));
  });
  return total;
}

BestPath best_path(const HsmmParams& p, const Ticks& ticks, const StartFn& start, const BoundaryFn& boundary) {
  BestPath best;
  best.log_score = kNegInf;
  bool found = false;
  enumerate(ticks, p.M, p.Dmax, [&](const Path& path) {
    const double s = score_path(p, ticks, path, start, boundary);
    if (!found || s > best.log_score) {
      if (s == kNegInf) return;
      best.path = path;
      best.log_score = s;
      found = true;
    }
  });
  if (!found) best.path.clear();
  return best;
}

StartFn pi_start(const HsmmParams& p) {
  return [&p](const DecodedSegment& s) { return lg(p.pi(flat(p, s))); };
}

BoundaryFn plain_boundary(const HsmmParams& p) {
  return [&p](const DecodedSegment& a, const DecodedSegment& b, std::size_t) {
    return lg(p.A(flat(p, a), flat(p, b)));
  };
}

double normal_pdf(double x, double mu, double sigma) {
  return std::exp(-(x - mu) * (x - mu) / (2.0 * sigma * sigma)) / std::sqrt(2.0 * std::numbers::pi * sigma * sigma);
}

// Scans every integer gap length inside every pair's support.
double outside_density(const IlpParams& p) {
  double lowest = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < p.base.M; ++i)
    for (std::size_t j = 0; j < p.base.M; ++j) {
      if (i == j) continue;
      const auto& g = p.L[i * p.base.M + j];
      for (long l = 0; static_cast<double>(l) <= g.hi; ++l)
        if (static_cast<double>(l) >= g.lo) lowest = std::min(lowest, normal_pdf(static_cast<double>(l), g.mu, g.sigma));
    }
  if (lowest == std::numeric_limits<double>::infinity()) lowest = p.delta_pt;
  return p.c * lowest;
}

BoundaryFn interval_boundary(const IlpParams& p, double outside) {
  return [&p, outside](const DecodedSegment& a, const DecodedSegment& b, std::size_t gap) {
    double f = lg(p.base.A(flat(p.base, a), flat(p.base, b)));
    if (gap > 0) {
      const auto& g = p.L[a.state * p.base.M + b.state];
      const auto l = static_cast<double>(gap);
      f += lg(l >= g.lo && l <= g.hi ? normal_pdf(l, g.mu, g.sigma) : outside);
    }
    return f;
  };
}

}  // namespace

double brute_likelihood(const HsmmParams& params, const Sequence& seq, InputView view) {
  const Ticks ticks = ticks_of(seq, view == InputView::stripped);
  return sum_paths(params, ticks, pi_start(params), plain_boundary(params));
}

double brute_likelihood_is(const IsHsmmParams& params, const Sequence& seq) {
  const Ticks ticks = ticks_of(seq, true);
  const HsmmParams& p = params.base;
  const std::size_t lead = seq.obs.empty() ? 0 : (ticks.obs.empty() ? seq.obs.size() : ticks.gap[0]);
  auto bucket = [&](std::size_t g) { return std::min(g, params.Dmax_int); };
  // probability of bucket b among the interval buckets of one choice row
  auto given_gap = [&](const Eigen::VectorXd& row, std::size_t b) {
    double total = 0.0;
    for (std::size_t c = 1; c <= params.Dmax_int; ++c) total += row(static_cast<Eigen::Index>(c));
    if (total <= 0.0) return 1.0 / static_cast<double>(params.Dmax_int);
    return row(static_cast<Eigen::Index>(b)) / total;
  };
  StartFn start = [&](const DecodedSegment& s) {
    if (lead == 0) return lg(p.pi(flat(p, s)));
    const std::size_t b = bucket(lead);
    return lg(params.bridge_start(static_cast<Eigen::Index>(b - 1), flat(p, s))) +
           lg(given_gap(params.gap_choice_start, b));
  };
  BoundaryFn boundary = [&](const DecodedSegment& a, const DecodedSegment& b, std::size_t gap) {
    if (gap == 0) return lg(p.A(flat(p, a), flat(p, b)));
    const std::size_t k = bucket(gap);
    const Eigen::VectorXd row = params.gap_choice.row(static_cast<Eigen::Index>(flat(p, a))).transpose();
    return lg(params.bridge[k - 1](flat(p, a), flat(p, b))) + lg(given_gap(row, k));
  };
  return sum_paths(p, ticks, start, boundary);
}

double brute_likelihood_ilp(const IlpParams& params, const Sequence& seq) {
  const Ticks ticks = ticks_of(seq, true);
  return sum_paths(params.base, ticks, pi_start(params.base), interval_boundary(params, outside_density(params)));
}

BestPath brute_best_path(const HsmmParams& params, const Sequence& seq, InputView view) {
  const Ticks ticks = ticks_of(seq, view == InputView::stripped);
  return best_path(params, ticks, pi_start(params), plain_boundary(params));
}

BestPath brute_best_path_ilp(const IlpParams& params, const Sequence& seq) {
  const Ticks ticks = ticks_of(seq, true);
  return best_path(params.base, ticks, pi_start(params.base), interval_boundary(params, outside_density(params)));
}

BrutePosterior brute_posteriors(const HsmmParams& params, const Sequence& seq, InputView view) {
  const Ticks ticks = ticks_of(seq, view == InputView::stripped);
  const auto S = static_cast<Eigen::Index>(params.super_states());
  BrutePosterior out{Eigen::VectorXd::Zero(S), Eigen::MatrixXd::Zero(S, S),
                     Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(params.M), static_cast<Eigen::Index>(params.N))};
  const auto start = pi_start(params);
  const auto boundary = plain_boundary(params);
  double total = 0.0;
  enumerate(ticks, params.M, params.Dmax, [&](const Path& path) {
    const double w = std::exp(score_path(params, ticks, path, start, boundary));
    if (w == 0.0 || path.empty()) return;
    total += w;
    out.initial(flat(params, path[0])) += w;
    for (std::size_t k = 0; k < path.size(); ++k) {
      if (k > 0) out.transition(flat(params, path[k - 1]), flat(params, path[k])) += w;
      for (std::size_t t = path[k].start; t < path[k].start + path[k].duration; ++t)
        out.emission(static_cast<Eigen::Index>(path[k].state), ticks.obs[t]) += w;
    }
  });
  if (total > 0.0) {
    out.initial /= total;
    out.transition /= total;
    out.emission /= total;
  }
  return out;
}

double path_log_score(const HsmmParams& params, const Sequence& seq, const std::vector<DecodedSegment>& path,
                      InputView view) {
  const Ticks ticks = ticks_of(seq, view == InputView::stripped);
  return score_path(params, ticks, path, pi_start(params), plain_boundary(params));
}

double path_log_score_ilp(const IlpParams& params, const Sequence& seq, const std::vector<DecodedSegment>& path) {
  const Ticks ticks = ticks_of(seq, true);
  return score_path(params.base, ticks, path, pi_start(params.base),
                    interval_boundary(params, outside_density(params)));
}

}  // namespace ihsmm::oracle
