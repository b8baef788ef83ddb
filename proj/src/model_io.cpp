#include "ihsmm/model_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ihsmm/dataset.hpp"
#include "ihsmm/errors.hpp"

namespace ihsmm {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using nlohmann::json;

namespace {

json matrix_json(const MatrixXd& m) {
  json rows = json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_json(const VectorXd& v) {
  json out = json::array();
  for (Index k = 0; k < v.size(); ++k) out.push_back(v(k));
  return out;
}

json config_json(const TrainConfig& c) {
  return json{{"epsilon", c.epsilon},
              {"max_iters", c.max_iters},
              {"seed", c.seed},
              {"kappa", c.kappa},
              {"length_mode", std::string(to_string(c.length_mode))},
              {"input_view", std::string(to_string(c.input_view))},
              {"max_interval", c.max_interval},
              {"delta_pt", c.delta_pt},
              {"c", c.c},
              {"sigma_min", c.sigma_min},
              {"ilp_score", std::string(to_string(c.ilp_score))}};
}

void put_base(json& j, const HsmmParams& p) {
  j["M"] = p.M;
  j["N"] = p.N;
  j["Dmax"] = p.Dmax;
  MatrixXd pi(static_cast<Index>(p.M), static_cast<Index>(p.Dmax));
  for (Index s = 0; s < pi.rows(); ++s)
    for (Index d = 0; d < pi.cols(); ++d) pi(s, d) = p.pi(s * pi.cols() + d);
  j["pi"] = matrix_json(pi);
  j["A"] = matrix_json(p.A);
  j["B"] = matrix_json(p.B);
}

json model_json(const TrainedModel& m) {
  json j;
  j["kind"] = std::string(to_string(m.kind()));
  j["label"] = m.label;
  j["log_likelihood"] = m.log_likelihood;
  j["iterations"] = m.iterations;
  j["config"] = config_json(m.config);
  j["alphabet"] = m.alphabet;
  std::visit(
      [&](const auto& p) {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, HsmmParams>) {
          put_base(j, p);
        } else if constexpr (std::is_same_v<P, IsHsmmParams>) {
          put_base(j, p.base);
          j["Dmax_int"] = p.Dmax_int;
          json a2 = json::array();
          for (const auto& b : p.bridge) a2.push_back(matrix_json(b));
          j["A2"] = std::move(a2);
          j["A2_start"] = matrix_json(p.bridge_start);
          j["G"] = matrix_json(p.gap_choice);
          j["G_start"] = vector_json(p.gap_choice_start);
        } else {
          put_base(j, p.base);
          json L = json::array();
          for (std::size_t i = 0; i < p.base.M; ++i) {
            json row = json::array();
            for (std::size_t k = 0; k < p.base.M; ++k) {
              const auto& g = p.interval(i, k);
              row.push_back(json{{"mu", g.mu}, {"sigma", g.sigma}, {"lo", g.lo}, {"hi", g.hi}, {"observed", g.observed}});
            }
            L.push_back(std::move(row));
          }
          j["L"] = std::move(L);
          j["delta_pt"] = p.delta_pt;
          j["c"] = p.c;
          j["sigma_min"] = p.sigma_min;
        }
      },
      m.params);
  return j;
}

[[noreturn]] void schema(const std::string& what) { throw Error(ErrorCode::SchemaError, what); }

const json& field(const json& j, const char* key) {
  if (!j.is_object()) schema("expected an object");
  auto it = j.find(key);
  if (it == j.end()) schema(std::string("missing field \"") + key + "\"");
  return *it;
}

double number(const json& v, const std::string& what) {
  if (v.is_null()) throw Error(ErrorCode::ValidationError, what + " is not a finite number");
  if (!v.is_number()) schema(what + " must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw Error(ErrorCode::ValidationError, what + " is not a finite number");
  return x;
}

std::size_t count(const json& v, const std::string& what) {
  if (!v.is_number_unsigned()) schema(what + " must be a non-negative integer");
  return v.get<std::size_t>();
}

std::string text(const json& v, const std::string& what) {
  if (!v.is_string()) schema(what + " must be a string");
  return v.get<std::string>();
}

MatrixXd matrix(const json& v, std::size_t rows, std::size_t cols, const std::string& what) {
  if (!v.is_array() || v.size() != rows) schema(what + " must have " + std::to_string(rows) + " rows");
  MatrixXd m(static_cast<Index>(rows), static_cast<Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    const auto& row = v[r];
    if (!row.is_array() || row.size() != cols)
      schema(what + " row " + std::to_string(r) + " must have " + std::to_string(cols) + " entries");
    for (std::size_t c = 0; c < cols; ++c)
      m(static_cast<Index>(r), static_cast<Index>(c)) = number(row[c], what);
  }
  return m;
}

TrainConfig parse_config(const json& j) {
  TrainConfig c;
  c.epsilon = number(field(j, "epsilon"), "config.epsilon");
  c.max_iters = count(field(j, "max_iters"), "config.max_iters");
  c.seed = field(j, "seed").is_number_unsigned() ? field(j, "seed").get<std::uint64_t>()
                                                   : (schema("config.seed must be unsigned"), 0);
  c.kappa = number(field(j, "kappa"), "config.kappa");
  const auto lm = text(field(j, "length_mode"), "config.length_mode");
  if (lm != "clamp" && lm != "strict") schema("config.length_mode is invalid");
  c.length_mode = lm == "clamp" ? LengthMode::clamp : LengthMode::strict;
  const auto iv = text(field(j, "input_view"), "config.input_view");
  if (iv != "filled" && iv != "stripped") schema("config.input_view is invalid");
  c.input_view = iv == "filled" ? InputView::filled : InputView::stripped;
  c.max_interval = count(field(j, "max_interval"), "config.max_interval");
  c.delta_pt = number(field(j, "delta_pt"), "config.delta_pt");
  c.c = number(field(j, "c"), "config.c");
  c.sigma_min = number(field(j, "sigma_min"), "config.sigma_min");
  const auto sc = text(field(j, "ilp_score"), "config.ilp_score");
  if (sc != "viterbi" && sc != "forward") schema("config.ilp_score is invalid");
  c.ilp_score = sc == "viterbi" ? IlpScore::viterbi : IlpScore::forward;
  try {
    c.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::ValidationError, e.what());
  }
  return c;
}

HsmmParams parse_base(const json& j) {
  HsmmParams p;
  p.M = count(field(j, "M"), "M");
  p.N = count(field(j, "N"), "N");
  p.Dmax = count(field(j, "Dmax"), "Dmax");
  if (p.M == 0 || p.N == 0 || p.Dmax == 0) throw Error(ErrorCode::ValidationError, "M, N and Dmax must be positive");
  const std::size_t S = p.super_states();
  const MatrixXd pi = matrix(field(j, "pi"), p.M, p.Dmax, "pi");
  p.pi.resize(static_cast<Index>(S));
  for (Index s = 0; s < pi.rows(); ++s)
    for (Index d = 0; d < pi.cols(); ++d) p.pi(s * pi.cols() + d) = pi(s, d);
  p.A = matrix(field(j, "A"), S, S, "A");
  p.B = matrix(field(j, "B"), p.M, p.N, "B");
  return p;
}

TrainedModel parse_model_json(const json& j) {
  TrainedModel m;
  const auto kind = text(field(j, "kind"), "kind");
  ModelKind k;
  try {
    k = parse_model_kind(kind);
  } catch (const Error&) {
    schema("unknown kind '" + kind + "'");
  }
  m.label = text(field(j, "label"), "label");
  m.log_likelihood = number(field(j, "log_likelihood"), "log_likelihood");
  m.iterations = count(field(j, "iterations"), "iterations");
  m.config = parse_config(field(j, "config"));
  const auto& alphabet = field(j, "alphabet");
  if (!alphabet.is_array()) schema("alphabet must be an array");
  for (const auto& a : alphabet) m.alphabet.push_back(text(a, "alphabet entry"));

  HsmmParams base = parse_base(j);
  if (!m.alphabet.empty() && m.alphabet.size() != base.N) schema("alphabet size differs from N");
  const std::size_t S = base.super_states();
  if (k == ModelKind::hsmm) {
    base.validate();
    m.params = std::move(base);
  } else if (k == ModelKind::is_hsmm) {
    IsHsmmParams p;
    p.base = std::move(base);
    p.Dmax_int = count(field(j, "Dmax_int"), "Dmax_int");
    if (p.Dmax_int == 0) throw Error(ErrorCode::ValidationError, "Dmax_int must be positive");
    const auto& a2 = field(j, "A2");
    if (!a2.is_array() || a2.size() != p.Dmax_int) schema("A2 must have Dmax_int buckets");
    for (std::size_t b = 0; b < p.Dmax_int; ++b) p.bridge.push_back(matrix(a2[b], S, S, "A2"));
    p.bridge_start = matrix(field(j, "A2_start"), p.Dmax_int, S, "A2_start");
    p.gap_choice = matrix(field(j, "G"), S, p.Dmax_int + 1, "G");
    const auto& gs = field(j, "G_start");
    if (!gs.is_array() || gs.size() != p.Dmax_int + 1) schema("G_start has wrong size");
    p.gap_choice_start.resize(static_cast<Index>(p.Dmax_int + 1));
    for (std::size_t b = 0; b <= p.Dmax_int; ++b) p.gap_choice_start(static_cast<Index>(b)) = number(gs[b], "G_start");
    p.validate();
    m.params = std::move(p);
  } else {
    IlpParams p;
    p.base = std::move(base);
    p.delta_pt = number(field(j, "delta_pt"), "delta_pt");
    p.c = number(field(j, "c"), "c");
    p.sigma_min = number(field(j, "sigma_min"), "sigma_min");
    const auto& L = field(j, "L");
    if (!L.is_array() || L.size() != p.base.M) schema("L must be M x M");
    for (const auto& row : L) {
      if (!row.is_array() || row.size() != p.base.M) schema("L must be M x M");
      for (const auto& g : row) {
        IntervalGaussian ig;
        ig.mu = number(field(g, "mu"), "L.mu");
        ig.sigma = number(field(g, "sigma"), "L.sigma");
        ig.lo = number(field(g, "lo"), "L.lo");
        ig.hi = number(field(g, "hi"), "L.hi");
        if (!field(g, "observed").is_boolean()) schema("L.observed must be a boolean");
        ig.observed = field(g, "observed").get<bool>();
        p.L.push_back(ig);
      }
    }
    p.validate();
    m.params = std::move(p);
  }
  return m;
}

json parse_text(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::SchemaError, std::string("malformed JSON: ") + e.what());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::string serialize_model(const TrainedModel& model) { return model_json(model).dump() + "\n"; }

TrainedModel parse_model(std::string_view text) { return parse_model_json(parse_text(text)); }

std::string serialize_bank(std::span<const TrainedModel> bank) {
  json arr = json::array();
  for (const auto& m : bank) arr.push_back(model_json(m));
  return arr.dump() + "\n";
}

std::vector<TrainedModel> parse_bank(std::string_view text) {
  const json j = parse_text(text);
  if (!j.is_array()) schema("a model bank must be a JSON array");
  std::vector<TrainedModel> bank;
  for (const auto& m : j) bank.push_back(parse_model_json(m));
  return bank;
}

void save_model(const std::filesystem::path& path, const TrainedModel& model) {
  write_file_atomic(path, serialize_model(model));
}

TrainedModel load_model(const std::filesystem::path& path) { return parse_model(read_file(path)); }

void save_bank(const std::filesystem::path& path, std::span<const TrainedModel> bank) {
  write_file_atomic(path, serialize_bank(bank));
}

std::vector<TrainedModel> load_bank(const std::filesystem::path& path) { return parse_bank(read_file(path)); }

}  // namespace ihsmm
