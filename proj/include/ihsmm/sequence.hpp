#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ihsmm/symbols.hpp"

namespace ihsmm {

/// One observed symbol per tick.
struct Sequence {
  std::optional<std::size_t> label;
  std::vector<SymbolId> obs;

  std::size_t length() const { return obs.size(); }
  bool operator==(const Sequence&) const = default;
};

/// A maximal stretch of one non-interval symbol. start is the 0-based tick.
struct Run {
  SymbolId symbol;
  std::size_t start;
  std::size_t duration;

  bool operator==(const Run&) const = default;
};

/// Run-length view of a sequence. gaps has runs.size() + 1 entries: the
/// leading gap, the gap before each later run, and the trailing gap.
struct SegmentedSequence {
  std::vector<Run> runs;
  std::vector<std::size_t> gaps;
  std::size_t length = 0;

  /// Number of interval stretches strictly between two runs.
  std::size_t internal_intervals() const;
  bool operator==(const SegmentedSequence&) const = default;
};

Sequence encode_sequence(const std::vector<std::string>& raw, SymbolTable& table);
std::vector<std::string> decode_sequence(const Sequence& seq, const SymbolTable& table);

SegmentedSequence segment_runs(const Sequence& seq);
Sequence desegment(const SegmentedSequence& seg);

/// Copy of seq with every interval tick removed.
Sequence strip_intervals(const Sequence& seq);

}  // namespace ihsmm
