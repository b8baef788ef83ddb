#include "ihsmm/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ihsmm/errors.hpp"
#include "ihsmm/random.hpp"

namespace ihsmm::datagen {

using nlohmann::json;

Sequence quantize_volume(const VolumeTrace& trace, double b1, double b2, SymbolTable& table) {
  if (!(b1 >= 0.0) || !(b2 >= b1)) throw Error(ErrorCode::InvalidThresholds, "thresholds need b2 >= b1 >= 0");
  if (trace.samples.empty()) throw Error(ErrorCode::EmptySequence, "empty volume trace");
  Sequence seq;
  seq.obs.reserve(trace.samples.size());
  for (double v : trace.samples) {
    if (!std::isfinite(v) || v < 0.0) throw Error(ErrorCode::InvalidArgument, "volume samples must be finite and non-negative");
    if (v >= b2)
      seq.obs.push_back(table.intern("high"));
    else if (v >= b1)
      seq.obs.push_back(table.intern("low"));
    else
      seq.obs.push_back(SymbolTable::kInterval);
  }
  return seq;
}

Sequence music_scale_encode(std::span<const double> values, SymbolTable& table) {
  if (values.empty()) throw Error(ErrorCode::EmptySequence, "empty scale sequence");
  Sequence seq;
  for (double v : values) {
    const double scaled = v * 100.0;
    const double k = std::round(scaled);
    if (!std::isfinite(v) || std::abs(scaled - k) > 1e-6 || k < 0.0 || k > 12.0) {
      std::ostringstream ss;
      ss << "scale value " << v << " is not one of 0.00 .. 0.12";
      throw Error(ErrorCode::UnknownScaleValue, ss.str());
    }
    if (k == 0.0)
      seq.obs.push_back(SymbolTable::kInterval);
    else
      seq.obs.push_back(table.intern(kPitchNames[static_cast<std::size_t>(k) - 1]));
  }
  return seq;
}

std::string_view to_string(ProfileMode mode) {
  switch (mode) {
    case ProfileMode::templates: return "templates";
    case ProfileMode::interval_signature: return "interval-signature";
    case ProfileMode::volume: return "volume";
  }
  return "templates";
}

void GenProfile::validate() const {
  auto bad = [](const std::string& what) { throw Error(ErrorCode::InvalidArgument, what); };
  if (num_labels == 0) bad("num_labels must be positive");
  if (sequences_per_label == 0) bad("sequences_per_label must be positive");
  if (runs_per_sequence == 0) bad("runs_per_sequence must be positive");
  if (d_min < 1 || d_min > d_max) bad("durations need 1 <= d_min <= d_max");
  if (l_min > l_max) bad("gaps need l_min <= l_max");
  if (mode != ProfileMode::volume && (alphabet_size < 2 || alphabet_size > kPitchNames.size()))
    bad("alphabet_size must lie in 2..12");
  if (!(p_noise >= 0.0 && p_noise <= 1.0)) bad("p_noise must lie in [0, 1]");
  if (intervals_per_sequence >= 0) {
    if (static_cast<std::size_t>(intervals_per_sequence) + 1 > runs_per_sequence)
      bad("intervals_per_sequence exceeds the number of internal boundaries");
    if (intervals_per_sequence > 0 && l_max == 0) bad("intervals requested but l_max is 0");
  }
  if (mode == ProfileMode::interval_signature && (l_max == 0 || runs_per_sequence < 2))
    bad("interval-signature profiles need l_max >= 1 and at least two runs");
  if (!(b1 >= 0.0) || !(b2 >= b1)) throw Error(ErrorCode::InvalidThresholds, "thresholds need b2 >= b1 >= 0");
}

GenProfile default_profile() {
  GenProfile p;
  p.mode = ProfileMode::volume;
  p.num_labels = 27;
  p.sequences_per_label = 3;
  p.runs_per_sequence = 6;
  p.d_min = 1;
  p.d_max = 4;
  p.l_min = 0;
  p.l_max = 3;
  return p;
}

GenProfile timing_profile() {
  GenProfile p;
  p.mode = ProfileMode::templates;
  p.num_labels = 4;
  p.sequences_per_label = 4;
  p.runs_per_sequence = 8;
  p.d_min = p.d_max = 2;
  p.l_min = 1;
  p.l_max = 10;
  p.alphabet_size = 5;
  return p;
}

GenProfile interval_signature_profile() {
  GenProfile p;
  p.mode = ProfileMode::interval_signature;
  p.num_labels = 10;
  p.sequences_per_label = 3;
  p.runs_per_sequence = 4;
  p.d_min = 1;
  p.d_max = 3;
  p.l_min = 1;
  p.l_max = 9;
  p.alphabet_size = 4;
  p.p_noise = 0.05;
  p.duration_jitter = 0;
  p.gap_jitter = 1;
  return p;
}

GenProfile repro_profile() {
  GenProfile p;
  p.mode = ProfileMode::templates;
  p.num_labels = 20;
  p.sequences_per_label = 1;
  p.runs_per_sequence = 9;
  p.d_min = 1;
  p.d_max = 4;
  p.l_min = 1;
  p.l_max = 10;
  p.intervals_per_sequence = 0;
  p.alphabet_size = 5;
  p.p_noise = 0.0;
  p.duration_jitter = 0;
  p.gap_jitter = 0;
  return p;
}

namespace {

struct Template {
  std::vector<std::size_t> symbols;    // indices into the profile alphabet
  std::vector<std::size_t> durations;
  std::vector<std::size_t> gaps;       // gaps[k]: before run k; gaps[0] = 0
};

std::vector<std::size_t> draw_symbols(Rng& rng, std::size_t runs, std::size_t alphabet) {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < runs; ++k) {
    std::size_t s = rng.index(alphabet);
    if (k > 0 && s == out.back()) s = (s + 1 + rng.index(alphabet - 1)) % alphabet;
    out.push_back(s);
  }
  return out;
}

std::vector<std::size_t> draw_gaps(Rng& rng, const GenProfile& p) {
  const std::size_t R = p.runs_per_sequence;
  std::vector<std::size_t> gaps(R, 0);
  if (p.intervals_per_sequence < 0) {
    for (std::size_t k = 1; k < R; ++k) gaps[k] = rng.between(p.l_min, p.l_max);
    return gaps;
  }
  std::vector<std::size_t> slots;
  for (std::size_t k = 1; k < R; ++k) slots.push_back(k);
  for (std::size_t n = 0; n < static_cast<std::size_t>(p.intervals_per_sequence); ++n) {
    const std::size_t pick = n + rng.index(slots.size() - n);
    std::swap(slots[n], slots[pick]);
    gaps[slots[n]] = rng.between(std::max<std::size_t>(1, p.l_min), p.l_max);
  }
  return gaps;
}

std::size_t jittered(Rng& rng, std::size_t value, std::size_t jitter, std::size_t lo, std::size_t hi) {
  if (jitter == 0) return std::clamp(value, lo, hi);
  const auto off = static_cast<long>(rng.between(0, 2 * jitter)) - static_cast<long>(jitter);
  const long v = static_cast<long>(value) + off;
  return static_cast<std::size_t>(std::clamp(v, static_cast<long>(lo), static_cast<long>(hi)));
}

std::vector<std::string> alphabet_of(const GenProfile& p) {
  if (p.mode == ProfileMode::volume) return {"high", "low"};
  return {kPitchNames.begin(), kPitchNames.begin() + static_cast<long>(p.alphabet_size)};
}

std::string label_name(std::size_t l, std::size_t count) {
  const std::size_t width = std::to_string(count - 1).size();
  std::string n = std::to_string(l);
  return "L" + std::string(width - n.size(), '0') + n;
}

/// Noisy rendition of a template as per-tick symbol names.
std::vector<std::string> render(const Template& t, const GenProfile& p, const std::vector<std::string>& names,
                                const std::string& interval, Rng& rng) {
  std::vector<std::string> raw;
  if (p.add_start_end) raw.emplace_back("start");
  const std::size_t gap_lo = std::max<std::size_t>(1, p.l_min);
  for (std::size_t k = 0; k < t.symbols.size(); ++k) {
    const std::size_t gap = t.gaps[k] > 0 ? jittered(rng, t.gaps[k], p.gap_jitter, gap_lo, p.l_max) : 0;
    raw.insert(raw.end(), gap, interval);
    const std::size_t d = jittered(rng, t.durations[k], p.duration_jitter, p.d_min, p.d_max);
    std::size_t sym = t.symbols[k];
    if (p.p_noise > 0.0 && rng.bernoulli(p.p_noise))
      sym = (sym + 1 + rng.index(names.size() - 1)) % names.size();
    raw.insert(raw.end(), d, names[sym]);
  }
  if (p.add_start_end) raw.emplace_back("end");
  return raw;
}

/// Volume rendition: instrument 0 sustains, 1 decays slowly, 2 decays fast.
std::vector<std::string> render_volume(const Template& t, const GenProfile& p, std::size_t instrument,
                                       SymbolTable& table, Rng& rng) {
  static constexpr double kDecay[3] = {1.0, 0.7, 0.35};
  VolumeTrace trace;
  for (std::size_t k = 0; k < t.symbols.size(); ++k) {
    const std::size_t gap = t.gaps[k] > 0 ? jittered(rng, t.gaps[k], p.gap_jitter, std::max<std::size_t>(1, p.l_min), p.l_max) : 0;
    trace.samples.insert(trace.samples.end(), gap, 0.0);
    const std::size_t d = jittered(rng, t.durations[k], p.duration_jitter, p.d_min, p.d_max);
    // symbol index 0 is an accented note, 1 a soft one
    double v = t.symbols[k] == 0 ? 0.9 : 0.5;
    for (std::size_t i = 0; i < d; ++i) {
      double sample = v;
      if (p.p_noise > 0.0 && rng.bernoulli(p.p_noise)) sample = rng.uniform();
      trace.samples.push_back(sample);
      v *= kDecay[instrument % 3];
    }
  }
  const Sequence seq = quantize_volume(trace, p.b1, p.b2, table);
  std::vector<std::string> raw;
  if (p.add_start_end) raw.emplace_back("start");
  for (SymbolId s : seq.obs) raw.push_back(table.name(s));
  if (p.add_start_end) raw.emplace_back("end");
  return raw;
}

}  // namespace

SynthData synth_dataset(const GenProfile& profile) {
  profile.validate();
  const auto names = alphabet_of(profile);
  SymbolTable table;
  for (const auto& n : names) table.intern(n);
  const std::string interval = table.interval_name();
  const std::size_t A = names.size();

  std::vector<Template> templates(profile.num_labels);
  if (profile.mode == ProfileMode::interval_signature) {
    Rng rng(derive_seed(profile.seed, 0x5167));
    Template shared;
    shared.symbols = draw_symbols(rng, profile.runs_per_sequence, A);
    for (std::size_t k = 0; k < profile.runs_per_sequence; ++k)
      shared.durations.push_back(rng.between(profile.d_min, profile.d_max));
    std::set<std::vector<std::size_t>> used;
    for (auto& t : templates) {
      t = shared;
      for (int attempt = 0; attempt < 1000; ++attempt) {
        t.gaps.assign(profile.runs_per_sequence, 0);
        for (std::size_t k = 1; k < profile.runs_per_sequence; ++k)
          t.gaps[k] = rng.between(std::max<std::size_t>(1, profile.l_min), profile.l_max);
        if (used.insert(t.gaps).second) break;
      }
    }
  } else {
    for (std::size_t l = 0; l < profile.num_labels; ++l) {
      Rng rng(derive_seed(profile.seed, 0x7e00 + l));
      auto& t = templates[l];
      t.symbols = draw_symbols(rng, profile.runs_per_sequence, A);
      for (std::size_t k = 0; k < profile.runs_per_sequence; ++k)
        t.durations.push_back(rng.between(profile.d_min, profile.d_max));
      t.gaps = draw_gaps(rng, profile);
    }
  }

  SynthData out;
  Dataset* splits[2] = {&out.train, &out.test};
  for (std::size_t s = 0; s < 2; ++s) {
    Dataset& data = *splits[s];
    data.table = table;
    data.split = s == 0 ? Split::train : Split::test;
    for (std::size_t l = 0; l < profile.num_labels; ++l)
      for (std::size_t v = 0; v < profile.sequences_per_label; ++v) {
        Rng rng(derive_seed(profile.seed, ((s + 1) << 40) ^ (l << 20) ^ v));
        auto raw = profile.mode == ProfileMode::volume
                       ? render_volume(templates[l], profile, v, data.table, rng)
                       : render(templates[l], profile, names, interval, rng);
        data.add(label_name(l, profile.num_labels), raw);
      }
  }
  return out;
}

namespace {

ProfileMode parse_mode(const std::string& s) {
  if (s == "templates") return ProfileMode::templates;
  if (s == "interval-signature") return ProfileMode::interval_signature;
  if (s == "volume") return ProfileMode::volume;
  throw Error(ErrorCode::SchemaError, "unknown profile mode '" + s + "'");
}

}  // namespace

GenProfile parse_profile(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::SchemaError, std::string("malformed profile JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::SchemaError, "profile must be a JSON object");
  GenProfile p;
  auto size = [&](const json& v, const std::string& key) -> std::size_t {
    if (!v.is_number_unsigned()) throw Error(ErrorCode::SchemaError, key + " must be a non-negative integer");
    return v.get<std::size_t>();
  };
  auto real = [&](const json& v, const std::string& key) -> double {
    if (!v.is_number()) throw Error(ErrorCode::SchemaError, key + " must be a number");
    return v.get<double>();
  };
  for (const auto& [key, v] : j.items()) {
    if (key == "mode") {
      if (!v.is_string()) throw Error(ErrorCode::SchemaError, "mode must be a string");
      p.mode = parse_mode(v.get<std::string>());
    } else if (key == "num_labels") p.num_labels = size(v, key);
    else if (key == "sequences_per_label") p.sequences_per_label = size(v, key);
    else if (key == "runs_per_sequence") p.runs_per_sequence = size(v, key);
    else if (key == "d_min") p.d_min = size(v, key);
    else if (key == "d_max") p.d_max = size(v, key);
    else if (key == "l_min") p.l_min = size(v, key);
    else if (key == "l_max") p.l_max = size(v, key);
    else if (key == "intervals_per_sequence") {
      if (!v.is_number_integer()) throw Error(ErrorCode::SchemaError, key + " must be an integer");
      p.intervals_per_sequence = v.get<int>();
    } else if (key == "alphabet_size") p.alphabet_size = size(v, key);
    else if (key == "add_start_end") {
      if (!v.is_boolean()) throw Error(ErrorCode::SchemaError, key + " must be a boolean");
      p.add_start_end = v.get<bool>();
    } else if (key == "p_noise") p.p_noise = real(v, key);
    else if (key == "duration_jitter") p.duration_jitter = size(v, key);
    else if (key == "gap_jitter") p.gap_jitter = size(v, key);
    else if (key == "b1") p.b1 = real(v, key);
    else if (key == "b2") p.b2 = real(v, key);
    else if (key == "seed") {
      if (!v.is_number_unsigned()) throw Error(ErrorCode::SchemaError, "seed must be a non-negative integer");
      p.seed = v.get<std::uint64_t>();
    } else {
      throw Error(ErrorCode::SchemaError, "unknown profile key '" + key + "'");
    }
  }
  p.validate();
  return p;
}

GenProfile load_profile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_profile(ss.str());
}

std::string profile_to_json(const GenProfile& p) {
  json j{{"mode", std::string(to_string(p.mode))},
         {"num_labels", p.num_labels},
         {"sequences_per_label", p.sequences_per_label},
         {"runs_per_sequence", p.runs_per_sequence},
         {"d_min", p.d_min},
         {"d_max", p.d_max},
         {"l_min", p.l_min},
         {"l_max", p.l_max},
         {"intervals_per_sequence", p.intervals_per_sequence},
         {"alphabet_size", p.alphabet_size},
         {"add_start_end", p.add_start_end},
         {"p_noise", p.p_noise},
         {"duration_jitter", p.duration_jitter},
         {"gap_jitter", p.gap_jitter},
         {"b1", p.b1},
         {"b2", p.b2},
         {"seed", p.seed}};
  return j.dump(2) + "\n";
}

}  // namespace ihsmm::datagen
