#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ihsmm {

using SymbolId = std::int32_t;

/// Observation alphabet. Ids are dense and stable; the reserved interval,
/// start and end symbols always occupy ids 0, 1 and 2.
class SymbolTable {
 public:
  static constexpr SymbolId kInterval = 0;
  static constexpr SymbolId kStart = 1;
  static constexpr SymbolId kEnd = 2;
  static constexpr std::size_t kReserved = 3;

  explicit SymbolTable(std::string interval_name = "i");

  /// Builds a table from an ordered name list. Reserved names are placed
  /// first regardless of where they appear; duplicates are rejected.
  static SymbolTable from_names(const std::vector<std::string>& names,
                                std::string interval_name = "i");

  /// Returns the id for name, registering it if the table is open.
  SymbolId intern(std::string_view name);
  std::optional<SymbolId> find(std::string_view name) const;
  SymbolId at(std::string_view name) const;
  const std::string& name(SymbolId id) const;

  std::size_t size() const { return names_.size(); }
  bool contains(SymbolId id) const { return id >= 0 && static_cast<std::size_t>(id) < size(); }
  const std::vector<std::string>& names() const { return names_; }
  const std::string& interval_name() const { return names_[kInterval]; }

  void freeze() { frozen_ = true; }
  bool frozen() const { return frozen_; }

  bool operator==(const SymbolTable& other) const { return names_ == other.names_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, SymbolId> index_;
  bool frozen_ = false;
};

}  // namespace ihsmm
