#include "ihsmm/sequence.hpp"

#include "ihsmm/errors.hpp"

namespace ihsmm {

std::size_t SegmentedSequence::internal_intervals() const {
  std::size_t n = 0;
  for (std::size_t k = 1; k + 1 < gaps.size(); ++k) n += gaps[k] > 0;
  return n;
}

Sequence encode_sequence(const std::vector<std::string>& raw, SymbolTable& table) {
  if (raw.empty()) throw Error(ErrorCode::EmptySequence, "empty sequence");
  Sequence seq;
  seq.obs.reserve(raw.size());
  for (const auto& name : raw) seq.obs.push_back(table.intern(name));
  return seq;
}

std::vector<std::string> decode_sequence(const Sequence& seq, const SymbolTable& table) {
  std::vector<std::string> out;
  out.reserve(seq.obs.size());
  for (SymbolId id : seq.obs) out.push_back(table.name(id));
  return out;
}

SegmentedSequence segment_runs(const Sequence& seq) {
  SegmentedSequence seg;
  seg.length = seq.obs.size();
  std::size_t gap = 0;
  for (std::size_t t = 0; t < seq.obs.size(); ++t) {
    const SymbolId s = seq.obs[t];
    if (s == SymbolTable::kInterval) {
      ++gap;
      continue;
    }
    if (!seg.runs.empty() && gap == 0 && seg.runs.back().symbol == s) {
      ++seg.runs.back().duration;
      continue;
    }
    seg.gaps.push_back(gap);
    seg.runs.push_back({s, t, 1});
    gap = 0;
  }
  seg.gaps.push_back(gap);
  return seg;
}

Sequence desegment(const SegmentedSequence& seg) {
  Sequence seq;
  seq.obs.reserve(seg.length);
  for (std::size_t k = 0; k < seg.runs.size(); ++k) {
    seq.obs.insert(seq.obs.end(), seg.gaps[k], SymbolTable::kInterval);
    seq.obs.insert(seq.obs.end(), seg.runs[k].duration, seg.runs[k].symbol);
  }
  if (!seg.gaps.empty()) seq.obs.insert(seq.obs.end(), seg.gaps.back(), SymbolTable::kInterval);
  return seq;
}

Sequence strip_intervals(const Sequence& seq) {
  Sequence out;
  out.label = seq.label;
  for (SymbolId s : seq.obs)
    if (s != SymbolTable::kInterval) out.obs.push_back(s);
  return out;
}

}  // namespace ihsmm
