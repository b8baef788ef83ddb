#include "ihsmm/symbols.hpp"

#include "ihsmm/errors.hpp"

namespace ihsmm {

SymbolTable::SymbolTable(std::string interval_name) {
  if (interval_name.empty() || interval_name == "start" || interval_name == "end")
    throw Error(ErrorCode::InvalidArgument, "invalid interval symbol name '" + interval_name + "'");
  for (std::string name : {std::move(interval_name), std::string("start"), std::string("end")}) {
    index_.emplace(name, static_cast<SymbolId>(names_.size()));
    names_.push_back(std::move(name));
  }
}

SymbolTable SymbolTable::from_names(const std::vector<std::string>& names,
                                    std::string interval_name) {
  SymbolTable table(std::move(interval_name));
  std::unordered_map<std::string, int> seen;
  for (const auto& name : names) {
    if (name.empty()) throw Error(ErrorCode::SchemaError, "empty symbol name");
    if (++seen[name] > 1) throw Error(ErrorCode::SchemaError, "duplicate symbol '" + name + "'");
    table.intern(name);
  }
  return table;
}

SymbolId SymbolTable::intern(std::string_view name) {
  if (auto id = find(name)) return *id;
  if (frozen_) throw Error(ErrorCode::UnknownSymbol, "unknown symbol '" + std::string(name) + "'");
  if (name.empty()) throw Error(ErrorCode::SchemaError, "empty symbol name");
  const auto id = static_cast<SymbolId>(names_.size());
  names_.emplace_back(name);
  index_.emplace(names_.back(), id);
  return id;
}

std::optional<SymbolId> SymbolTable::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

SymbolId SymbolTable::at(std::string_view name) const {
  if (auto id = find(name)) return *id;
  throw Error(ErrorCode::UnknownSymbol, "unknown symbol '" + std::string(name) + "'");
}

const std::string& SymbolTable::name(SymbolId id) const {
  if (!contains(id)) throw Error(ErrorCode::UnknownSymbol, "symbol id " + std::to_string(id) + " out of range");
  return names_[static_cast<std::size_t>(id)];
}

}  // namespace ihsmm
