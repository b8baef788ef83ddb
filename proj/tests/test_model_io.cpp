#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <functional>
#include <limits>

#include "ihsmm/datagen.hpp"
#include "ihsmm/errors.hpp"
#include "ihsmm/model.hpp"
#include "ihsmm/model_io.hpp"

using namespace ihsmm;

namespace {

std::vector<TrainedModel> small_bank(ModelKind kind) {
  datagen::GenProfile p;
  p.num_labels = 2;
  p.seed = 8;
  const auto data = datagen::synth_dataset(p).train;
  TrainConfig cfg;
  cfg.max_iters = 5;
  cfg.max_interval = 4;
  return train_bank(data, kind, 3, 3, cfg);
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::IoError;
}

}  // namespace

TEST_CASE("models round trip byte for byte") {
  for (ModelKind kind : {ModelKind::hsmm, ModelKind::is_hsmm, ModelKind::ilp_hsmm}) {
    CAPTURE(to_string(kind));
    const auto bank = small_bank(kind);
    const std::string text = serialize_bank(bank);
    const auto loaded = parse_bank(text);
    REQUIRE(loaded.size() == bank.size());
    CHECK(serialize_bank(loaded) == text);
    for (std::size_t k = 0; k < bank.size(); ++k) {
      CHECK(loaded[k].kind() == kind);
      CHECK(loaded[k].label == bank[k].label);
      CHECK(loaded[k].alphabet == bank[k].alphabet);
      CHECK(base_params(loaded[k].params).A == base_params(bank[k].params).A);
      CHECK(serialize_model(parse_model(serialize_model(bank[k]))) == serialize_model(bank[k]));
    }
  }
}

TEST_CASE("files round trip") {
  const auto dir = std::filesystem::temp_directory_path() / "ihsmm_model_io_test";
  std::filesystem::create_directories(dir);
  const auto bank = small_bank(ModelKind::ilp_hsmm);
  save_bank(dir / "bank.json", bank);
  CHECK(serialize_bank(load_bank(dir / "bank.json")) == serialize_bank(bank));
  save_model(dir / "one.json", bank[0]);
  CHECK(serialize_model(load_model(dir / "one.json")) == serialize_model(bank[0]));
  CHECK(code_of([&] { (void)load_bank(dir / "missing.json"); }) == ErrorCode::IoError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("non-finite numbers are rejected on load") {
  auto bank = small_bank(ModelKind::hsmm);
  auto& p = std::get<HsmmParams>(bank[0].params);
  p.B(0, 0) = std::numeric_limits<double>::quiet_NaN();
  const std::string text = serialize_model(bank[0]);
  CHECK(text.find("null") != std::string::npos);
  CHECK(code_of([&] { (void)parse_model(text); }) == ErrorCode::ValidationError);
}

TEST_CASE("malformed documents are schema errors") {
  CHECK(code_of([] { (void)parse_model("{"); }) == ErrorCode::SchemaError);
  CHECK(code_of([] { (void)parse_model("[]"); }) == ErrorCode::SchemaError);
  CHECK(code_of([] { (void)parse_bank("{}"); }) == ErrorCode::SchemaError);
  const auto bank = small_bank(ModelKind::hsmm);
  std::string text = serialize_model(bank[0]);
  const auto at = text.find("\"kind\":\"hsmm\"");
  REQUIRE(at != std::string::npos);
  text.replace(at, 13, "\"kind\":\"xyz\"");
  CHECK_THROWS_AS((void)parse_model(text), Error);
}

TEST_CASE("non-stochastic parameters fail validation") {
  auto bank = small_bank(ModelKind::hsmm);
  std::get<HsmmParams>(bank[0].params).B(0, 0) += 0.5;
  const std::string text = serialize_model(bank[0]);
  CHECK(code_of([&] { (void)parse_model(text); }) == ErrorCode::ValidationError);
}
