#include "ihsmm/params.hpp"

#include <cmath>
#include <string>

#include "ihsmm/errors.hpp"

namespace ihsmm {

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::hsmm: return "hsmm";
    case ModelKind::is_hsmm: return "is-hsmm";
    case ModelKind::ilp_hsmm: return "ilp-hsmm";
  }
  return "hsmm";
}

ModelKind parse_model_kind(std::string_view text) {
  if (text == "hsmm") return ModelKind::hsmm;
  if (text == "is-hsmm") return ModelKind::is_hsmm;
  if (text == "ilp-hsmm") return ModelKind::ilp_hsmm;
  throw Error(ErrorCode::InvalidArgument, "unknown model kind '" + std::string(text) + "'");
}

std::string_view to_string(InputView v) { return v == InputView::filled ? "filled" : "stripped"; }
std::string_view to_string(LengthMode m) { return m == LengthMode::clamp ? "clamp" : "strict"; }
std::string_view to_string(IlpScore s) { return s == IlpScore::viterbi ? "viterbi" : "forward"; }

namespace {

void fail(const std::string& what) { throw Error(ErrorCode::ValidationError, what); }

void check_entries(const Eigen::MatrixXd& m, const char* name) {
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const double v = m(r, c);
      if (!std::isfinite(v) || v < 0.0)
        fail(std::string(name) + " has an invalid entry at (" + std::to_string(r) + ", " +
             std::to_string(c) + ")");
    }
}

void check_sum(double sum, double tol, const std::string& what) {
  if (std::abs(sum - 1.0) > tol) fail(what + " sums to " + std::to_string(sum));
}

/// Super-state transition rows: stochastic over other states, zero into the
/// same state; all-zero when there is a single state.
void check_transition(const Eigen::MatrixXd& t, std::size_t M, std::size_t Dmax, double tol,
                      const std::string& name) {
  const auto S = static_cast<Eigen::Index>(M * Dmax);
  if (t.rows() != S || t.cols() != S) fail(name + " has wrong shape");
  check_entries(t, name.c_str());
  const auto D = static_cast<Eigen::Index>(Dmax);
  for (Eigen::Index r = 0; r < S; ++r) {
    if (t.block(r, (r / D) * D, 1, D).sum() != 0.0)
      fail(name + " row " + std::to_string(r) + " returns to its own state");
    if (M > 1) check_sum(t.row(r).sum(), tol, name + " row " + std::to_string(r));
  }
}

}  // namespace

void HsmmParams::validate(double tol) const {
  if (M == 0 || N == 0 || Dmax == 0) throw Error(ErrorCode::InvalidDims, "M, N and Dmax must be positive");
  const auto S = static_cast<Eigen::Index>(super_states());
  if (pi.size() != S) fail("pi has wrong size");
  if (B.rows() != static_cast<Eigen::Index>(M) || B.cols() != static_cast<Eigen::Index>(N))
    fail("B has wrong shape");
  check_entries(pi, "pi");
  check_sum(pi.sum(), tol, "pi");
  check_transition(A, M, Dmax, tol, "A");
  check_entries(B, "B");
  for (Eigen::Index r = 0; r < B.rows(); ++r) check_sum(B.row(r).sum(), tol, "B row " + std::to_string(r));
}

void IsHsmmParams::validate(double tol) const {
  base.validate(tol);
  if (Dmax_int == 0) throw Error(ErrorCode::InvalidDims, "Dmax_int must be positive");
  const auto S = static_cast<Eigen::Index>(base.super_states());
  const auto G = static_cast<Eigen::Index>(Dmax_int);
  if (bridge.size() != Dmax_int) fail("A2 has wrong bucket count");
  for (std::size_t b = 0; b < bridge.size(); ++b)
    check_transition(bridge[b], base.M, base.Dmax, tol, "A2 bucket " + std::to_string(b + 1));
  if (bridge_start.rows() != G || bridge_start.cols() != S) fail("A2_start has wrong shape");
  check_entries(bridge_start, "A2_start");
  for (Eigen::Index r = 0; r < G; ++r) check_sum(bridge_start.row(r).sum(), tol, "A2_start row " + std::to_string(r));
  if (gap_choice.rows() != S || gap_choice.cols() != G + 1) fail("G has wrong shape");
  check_entries(gap_choice, "G");
  for (Eigen::Index r = 0; r < S; ++r) check_sum(gap_choice.row(r).sum(), tol, "G row " + std::to_string(r));
  if (gap_choice_start.size() != G + 1) fail("G_start has wrong size");
  check_entries(gap_choice_start, "G_start");
  check_sum(gap_choice_start.sum(), tol, "G_start");
}

void IlpParams::validate(double tol) const {
  base.validate(tol);
  if (L.size() != base.M * base.M) fail("L has wrong size");
  if (!(delta_pt > 0.0) || !std::isfinite(delta_pt)) fail("delta_pt must be positive");
  if (!(c >= 0.0 && c <= 1.0)) fail("c must lie in [0, 1]");
  if (!(sigma_min > 0.0) || !std::isfinite(sigma_min)) fail("sigma_min must be positive");
  for (std::size_t k = 0; k < L.size(); ++k) {
    const auto& g = L[k];
    const std::string at = "L[" + std::to_string(k / base.M) + "][" + std::to_string(k % base.M) + "]";
    if (!std::isfinite(g.mu) || !std::isfinite(g.sigma) || !std::isfinite(g.lo) || !std::isfinite(g.hi))
      fail(at + " is not finite");
    if (g.sigma < sigma_min * (1.0 - 1e-12)) fail(at + " sigma below sigma_min");
    if (!(g.lo <= g.mu && g.mu <= g.hi)) fail(at + " support does not contain mu");
  }
}

const HsmmParams& base_params(const ModelParams& params) {
  return std::visit(
      [](const auto& p) -> const HsmmParams& {
        if constexpr (std::is_same_v<std::decay_t<decltype(p)>, HsmmParams>)
          return p;
        else
          return p.base;
      },
      params);
}

ModelKind kind_of(const ModelParams& params) {
  switch (params.index()) {
    case 0: return ModelKind::hsmm;
    case 1: return ModelKind::is_hsmm;
    default: return ModelKind::ilp_hsmm;
  }
}

void TrainConfig::validate() const {
  auto bad = [](const std::string& what) { throw Error(ErrorCode::InvalidArgument, what); };
  if (!(epsilon > 0.0)) bad("epsilon must be positive");
  if (max_iters == 0) bad("max_iters must be at least 1");
  if (!(kappa >= 0.0) || !std::isfinite(kappa)) bad("kappa must be non-negative");
  if (max_interval == 0) bad("max_interval must be at least 1");
  if (!(delta_pt > 0.0) || !std::isfinite(delta_pt)) bad("delta_pt must be positive");
  if (!(c >= 0.0 && c <= 1.0)) bad("c must lie in [0, 1]");
  if (!(sigma_min > 0.0) || !std::isfinite(sigma_min)) bad("sigma_min must be positive");
}

}  // namespace ihsmm
