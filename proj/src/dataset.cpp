#include "ihsmm/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <system_error>
#include <unistd.h>

#include <json.hpp>

#include "ihsmm/errors.hpp"

namespace ihsmm {

using nlohmann::json;

std::string_view to_string(Split split) {
  switch (split) {
    case Split::train: return "train";
    case Split::test: return "test";
    default: return "unspecified";
  }
}

void Dataset::add(const std::string& label, const std::vector<std::string>& raw) {
  Sequence seq = encode_sequence(raw, table);
  auto it = std::lower_bound(labels.begin(), labels.end(), label);
  const auto pos = static_cast<std::size_t>(it - labels.begin());
  if (it == labels.end() || *it != label) {
    labels.insert(it, label);
    for (auto& s : sequences)
      if (s.label && *s.label >= pos) ++*s.label;
  }
  seq.label = pos;
  sequences.push_back(std::move(seq));
}

void Dataset::normalize_labels() {
  std::vector<std::string> used;
  for (const auto& s : sequences)
    if (s.label) used.push_back(labels.at(*s.label));
  std::sort(used.begin(), used.end());
  used.erase(std::unique(used.begin(), used.end()), used.end());
  for (auto& s : sequences) {
    if (!s.label) continue;
    const auto& name = labels[*s.label];
    s.label = static_cast<std::size_t>(std::lower_bound(used.begin(), used.end(), name) - used.begin());
  }
  labels = std::move(used);
}

std::vector<const Sequence*> Dataset::with_label(std::size_t label) const {
  std::vector<const Sequence*> out;
  for (const auto& s : sequences)
    if (s.label == label) out.push_back(&s);
  return out;
}

bool Dataset::operator==(const Dataset& other) const {
  return table == other.table && labels == other.labels && sequences == other.sequences &&
         split == other.split;
}

namespace {

Split parse_split(const json& v, std::size_t line) {
  if (!v.is_string()) throw Error(ErrorCode::SchemaError, "\"split\" must be a string", line);
  const auto s = v.get<std::string>();
  if (s == "train") return Split::train;
  if (s == "test") return Split::test;
  if (s == "unspecified") return Split::unspecified;
  throw Error(ErrorCode::SchemaError, "unknown split '" + s + "'", line);
}

std::vector<std::string> string_list(const json& v, const char* key, std::size_t line) {
  if (!v.is_array()) throw Error(ErrorCode::SchemaError, std::string("\"") + key + "\" must be an array", line);
  std::vector<std::string> out;
  out.reserve(v.size());
  for (const auto& e : v) {
    if (!e.is_string())
      throw Error(ErrorCode::SchemaError, std::string("\"") + key + "\" entries must be strings", line);
    out.push_back(e.get<std::string>());
  }
  return out;
}

}  // namespace

Dataset read_dataset(std::istream& in) {
  Dataset data;
  std::string text;
  std::size_t line = 0;
  bool seen_record = false;
  bool seen_header = false;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    json obj;
    try {
      obj = json::parse(text);
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::SchemaError, std::string("malformed JSON: ") + e.what(), line);
    }
    if (!obj.is_object()) throw Error(ErrorCode::SchemaError, "expected a JSON object", line);

    if (obj.contains("alphabet")) {
      if (seen_record || seen_header)
        throw Error(ErrorCode::SchemaError, "header must be the first line", line);
      for (const auto& [key, _] : obj.items())
        if (key != "alphabet" && key != "interval_symbol" && key != "split")
          throw Error(ErrorCode::SchemaError, "unknown header key '" + key + "'", line);
      std::string interval = "i";
      if (obj.contains("interval_symbol")) {
        if (!obj["interval_symbol"].is_string())
          throw Error(ErrorCode::SchemaError, "\"interval_symbol\" must be a string", line);
        interval = obj["interval_symbol"].get<std::string>();
      }
      try {
        data.table = SymbolTable::from_names(string_list(obj["alphabet"], "alphabet", line), interval);
      } catch (const Error& e) {
        throw Error(e.code(), e.what(), line);
      }
      data.table.freeze();
      if (obj.contains("split")) data.split = parse_split(obj["split"], line);
      seen_header = true;
      continue;
    }

    for (const auto& [key, _] : obj.items())
      if (key != "label" && key != "obs")
        throw Error(ErrorCode::SchemaError, "unknown record key '" + key + "'", line);
    if (!obj.contains("label") || !obj["label"].is_string())
      throw Error(ErrorCode::SchemaError, "record needs a string \"label\"", line);
    if (!obj.contains("obs")) throw Error(ErrorCode::SchemaError, "record needs \"obs\"", line);
    const auto raw = string_list(obj["obs"], "obs", line);
    try {
      data.add(obj["label"].get<std::string>(), raw);
    } catch (const Error& e) {
      throw Error(e.code(), e.what(), line);
    }
    seen_record = true;
  }
  if (in.bad()) throw Error(ErrorCode::IoError, "read failure");
  return data;
}

void write_dataset(std::ostream& out, const Dataset& data) {
  json header;
  header["alphabet"] = data.table.names();
  header["interval_symbol"] = data.table.interval_name();
  if (data.split != Split::unspecified) header["split"] = std::string(to_string(data.split));
  out << header.dump() << '\n';
  for (const auto& seq : data.sequences) {
    json rec;
    rec["label"] = seq.label ? data.labels.at(*seq.label) : std::string();
    rec["obs"] = decode_sequence(seq, data.table);
    out << rec.dump() << '\n';
  }
}

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "'");
  return read_dataset(in);
}

void save_dataset(const std::filesystem::path& path, const Dataset& data) {
  std::ostringstream out;
  write_dataset(out, data);
  write_file_atomic(path, out.str());
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) throw Error(ErrorCode::IoError, "write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCode::IoError, "cannot rename onto '" + path.string() + "'");
  }
}

}  // namespace ihsmm
