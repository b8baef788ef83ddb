#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace ihsmm {

enum class ModelKind { hsmm, is_hsmm, ilp_hsmm };
std::string_view to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view text);

/// What the baseline model consumes: every tick with the interval symbol as
/// an ordinary observation, or only the observed ticks.
enum class InputView { filled, stripped };
/// Handling of stretches no state path can cover: scored as impossible, or
/// rejected with LengthExceeded.
enum class LengthMode { clamp, strict };
/// Interval-length model scoring: best path (max) or all paths (sum).
enum class IlpScore { viterbi, forward };

std::string_view to_string(InputView v);
std::string_view to_string(LengthMode m);
std::string_view to_string(IlpScore s);

/// Baseline explicit-duration parameters. A super state (j, d) is flattened
/// to j * Dmax + (d - 1) in pi and in both axes of A.
struct HsmmParams {
  std::size_t M = 0;
  std::size_t N = 0;
  std::size_t Dmax = 0;
  Eigen::VectorXd pi;  // M*Dmax
  Eigen::MatrixXd A;   // (M*Dmax) x (M*Dmax), structurally zero when states coincide
  Eigen::MatrixXd B;   // M x N, per-tick emission

  std::size_t super_states() const { return M * Dmax; }
  std::size_t index(std::size_t state, std::size_t duration) const {
    return state * Dmax + (duration - 1);
  }
  /// Throws ValidationError unless every distribution is finite,
  /// non-negative and sums to one within tol.
  void validate(double tol = 1e-9) const;
};

/// Interval-state model: the base HSMM handles gap-free boundaries, while a
/// boundary separated by an interval stretch of length l uses the bridge
/// tensor slice for bucket min(l, Dmax_int).
struct IsHsmmParams {
  HsmmParams base;
  std::size_t Dmax_int = 0;
  /// bridge[b - 1] is (M*Dmax) x (M*Dmax) for interval bucket b.
  std::vector<Eigen::MatrixXd> bridge;
  /// Row b - 1: first super state after a leading interval of bucket b.
  Eigen::MatrixXd bridge_start;  // Dmax_int x (M*Dmax)
  /// After super state k, column 0 is "no interval" and column b an interval
  /// of bucket b. Likelihoods use the bucket columns renormalized, and only
  /// at boundaries that cross an interval.
  Eigen::MatrixXd gap_choice;  // (M*Dmax) x (Dmax_int + 1)
  Eigen::VectorXd gap_choice_start;  // Dmax_int + 1

  std::size_t bucket(std::size_t gap) const { return gap < Dmax_int ? gap : Dmax_int; }
  void validate(double tol = 1e-9) const;
};

/// Gaussian density over the gap length between two states, truncated to
/// [lo, hi], the region where the density is at least delta_pt.
struct IntervalGaussian {
  double mu = 0.0;
  double sigma = 1.0;
  double lo = 0.0;
  double hi = 0.0;
  bool observed = false;

  bool operator==(const IntervalGaussian&) const = default;
};

struct IlpParams {
  HsmmParams base;
  std::vector<IntervalGaussian> L;  // M x M, row-major; diagonal unused
  double delta_pt = 1e-4;
  double c = 0.5;
  double sigma_min = 0.5;

  const IntervalGaussian& interval(std::size_t i, std::size_t j) const { return L[i * base.M + j]; }
  IntervalGaussian& interval(std::size_t i, std::size_t j) { return L[i * base.M + j]; }
  void validate(double tol = 1e-9) const;
};

using ModelParams = std::variant<HsmmParams, IsHsmmParams, IlpParams>;

const HsmmParams& base_params(const ModelParams& params);
ModelKind kind_of(const ModelParams& params);

struct TrainConfig {
  double epsilon = 1e-4;
  std::size_t max_iters = 100;
  std::uint64_t seed = 0;
  double kappa = 1e-6;
  LengthMode length_mode = LengthMode::clamp;
  InputView input_view = InputView::filled;  // baseline only
  std::size_t max_interval = 10;              // Dmax_int, interval-state model
  double delta_pt = 1e-4;                     // interval-length model
  double c = 0.5;
  double sigma_min = 0.5;
  IlpScore ilp_score = IlpScore::viterbi;

  void validate() const;
};

}  // namespace ihsmm
