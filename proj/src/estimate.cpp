#include "estimate.hpp"

#include <string>

#include "ihsmm/errors.hpp"

namespace ihsmm::detail {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

std::optional<VectorXd> normalize_counts(const VectorXd& counts, double kappa, Index skip,
                                         Index skip_len) {
  if (counts.sum() <= 0.0) return std::nullopt;
  VectorXd out = counts.array() + kappa;
  if (skip_len > 0) out.segment(skip, skip_len).setZero();
  const double total = out.sum();
  if (!(total > 0.0)) return std::nullopt;
  return VectorXd(out / total);
}

void update_rows(MatrixXd& dst, const MatrixXd& counts, double kappa, Index block) {
  for (Index r = 0; r < dst.rows(); ++r) {
    const Index skip = block > 0 ? (r / block) * block : 0;
    if (auto row = normalize_counts(counts.row(r).transpose(), kappa, skip, block))
      dst.row(r) = row->transpose();
  }
}

MatrixXd random_rows(Rng& rng, Index rows, Index cols, Index block) {
  MatrixXd m = MatrixXd::Zero(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    const Index skip = block > 0 ? (r / block) * block : -1;
    double total = 0.0;
    for (Index c = 0; c < cols; ++c) {
      if (block > 0 && c >= skip && c < skip + block) continue;
      m(r, c) = rng.uniform_open();
      total += m(r, c);
    }
    if (total > 0.0) m.row(r) /= total;
  }
  return m;
}

MatrixXd uniform_rows(Index rows, Index cols, Index block) {
  MatrixXd m = MatrixXd::Ones(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    if (block > 0) m.row(r).segment((r / block) * block, block).setZero();
    const double total = m.row(r).sum();
    if (total > 0.0) m.row(r) /= total;
  }
  return m;
}

VectorXd random_distribution(Rng& rng, Index size) {
  VectorXd v(size);
  for (Index k = 0; k < size; ++k) v(k) = rng.uniform_open();
  return v / v.sum();
}

Index argmax(std::span<const double> values) {
  Index best = 0;
  for (std::size_t k = 1; k < values.size(); ++k)
    if (values[k] > values[static_cast<std::size_t>(best)]) best = static_cast<Index>(k);
  return best;
}

Index argmax(const VectorXd& values) {
  return argmax(std::span<const double>(values.data(), static_cast<std::size_t>(values.size())));
}

Index argmax_row(const MatrixXd& m, Index row) {
  Index best = 0;
  for (Index c = 1; c < m.cols(); ++c)
    if (m(row, c) > m(row, best)) best = c;
  return best;
}

void check_symbols(const Sequence& seq, std::size_t N) {
  if (seq.obs.empty()) throw Error(ErrorCode::EmptySequence, "empty sequence");
  for (SymbolId s : seq.obs)
    if (s < 0 || static_cast<std::size_t>(s) >= N)
      throw Error(ErrorCode::UnknownSymbol,
                  "symbol id " + std::to_string(s) + " outside an alphabet of " + std::to_string(N));
}

void check_length(const SegmentModel& model, const LatticeInput& in, LengthMode mode) {
  if (mode == LengthMode::strict && !coverable(model, in))
    throw Error(ErrorCode::LengthExceeded,
                "a block is longer than the maximum duration " + std::to_string(model.max_duration()));
}

}  // namespace ihsmm::detail
