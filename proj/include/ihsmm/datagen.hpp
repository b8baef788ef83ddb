#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ihsmm/dataset.hpp"

namespace ihsmm::datagen {

struct VolumeTrace {
  std::vector<double> samples;  // non-negative power per tick
};

inline constexpr std::array<std::string_view, 12> kPitchNames = {
    "C", "C#", "D", "D#", "E", "F", "F#", "G", "G#", "A", "A#", "B"};

/// v >= b2 -> "high", b1 <= v < b2 -> "low", v < b1 -> interval.
Sequence quantize_volume(const VolumeTrace& trace, double b1, double b2, SymbolTable& table);

/// 0.01 .. 0.12 -> C .. B, 0.00 -> interval.
Sequence music_scale_encode(std::span<const double> values, SymbolTable& table);

enum class ProfileMode {
  /// Independent random template per label.
  templates,
  /// One shared symbol/duration template; labels differ in gap lengths only.
  interval_signature,
  /// Note templates rendered as volume traces by sustaining and decaying
  /// instruments, then quantized.
  volume,
};

std::string_view to_string(ProfileMode mode);

struct GenProfile {
  ProfileMode mode = ProfileMode::templates;
  std::size_t num_labels = 27;
  std::size_t sequences_per_label = 3;  // per split
  std::size_t runs_per_sequence = 8;
  std::size_t d_min = 1;
  std::size_t d_max = 4;
  std::size_t l_min = 0;
  std::size_t l_max = 3;
  /// Number of internal boundaries carrying a gap; negative: every boundary
  /// draws its gap from [l_min, l_max].
  int intervals_per_sequence = -1;
  std::size_t alphabet_size = 4;  // at most 12, pitch names
  bool add_start_end = false;
  double p_noise = 0.05;    // symbol substitution probability per run
  std::size_t duration_jitter = 1;  // +/- ticks on run durations
  std::size_t gap_jitter = 1;       // +/- ticks on gaps
  double b1 = 0.2;          // volume mode thresholds
  double b2 = 0.6;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Paper-sized default: 27 labels, three instrument renderings per split.
GenProfile default_profile();
/// Timing workload: fixed duration 2, gaps 1..10.
GenProfile timing_profile();
/// Ten labels separated only by their gap signature.
GenProfile interval_signature_profile();
/// Single-sequence labels for the reproducibility sweep; the sweep sets
/// intervals_per_sequence.
GenProfile repro_profile();

GenProfile parse_profile(std::string_view json_text);
GenProfile load_profile(const std::filesystem::path& path);
std::string profile_to_json(const GenProfile& profile);

struct SynthData {
  Dataset train;
  Dataset test;
};

/// Deterministic in profile.seed. Both splits share one alphabet.
SynthData synth_dataset(const GenProfile& profile);

}  // namespace ihsmm::datagen
