#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ihsmm/model.hpp"

namespace ihsmm {

/// Canonical JSON (sorted keys, shortest round-trip doubles): loading and
/// re-serializing a model reproduces the same bytes.
std::string serialize_model(const TrainedModel& model);
TrainedModel parse_model(std::string_view text);

/// A bank is a JSON array of model objects.
std::string serialize_bank(std::span<const TrainedModel> bank);
std::vector<TrainedModel> parse_bank(std::string_view text);

void save_model(const std::filesystem::path& path, const TrainedModel& model);
TrainedModel load_model(const std::filesystem::path& path);
void save_bank(const std::filesystem::path& path, std::span<const TrainedModel> bank);
std::vector<TrainedModel> load_bank(const std::filesystem::path& path);

}  // namespace ihsmm
