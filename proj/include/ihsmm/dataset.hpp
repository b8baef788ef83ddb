#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "ihsmm/sequence.hpp"
#include "ihsmm/symbols.hpp"

namespace ihsmm {

enum class Split { unspecified, train, test };

std::string_view to_string(Split split);

/// Labelled sequences over one alphabet. labels are kept sorted, so a
/// label's id (its index) is the same in every split that uses it.
struct Dataset {
  SymbolTable table;
  std::vector<std::string> labels;
  std::vector<Sequence> sequences;
  Split split = Split::unspecified;

  /// Appends a sequence of raw symbol names under label (interned).
  void add(const std::string& label, const std::vector<std::string>& raw);
  /// Re-sorts labels and remaps sequence label ids; drops unused labels.
  void normalize_labels();
  std::vector<const Sequence*> with_label(std::size_t label) const;

  bool operator==(const Dataset& other) const;
};

/// JSON Lines: optional header {"alphabet": [...], "interval_symbol": "i",
/// "split": ...} followed by one {"label": ..., "obs": [...]} per line.
Dataset read_dataset(std::istream& in);
void write_dataset(std::ostream& out, const Dataset& data);

Dataset load_dataset(const std::filesystem::path& path);
void save_dataset(const std::filesystem::path& path, const Dataset& data);

/// Writes content to path through a temporary file and a rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace ihsmm
