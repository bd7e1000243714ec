#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "loadguide/forecaster/forecaster.hpp"
#include "loadguide/guidance/guidance.hpp"
#include "loadguide/labeling/identify.hpp"
#include "loadguide/msp/msp.hpp"
#include "loadguide/synth/synth.hpp"
#include "loadguide/training.hpp"

namespace loadguide::app {

/// Every tunable of the command line tool. Keys (file and --set) match the
/// field names below; see README for the full list.
struct RunConfig {
  // paths
  std::filesystem::path data = "data.csv";
  std::filesystem::path truth = "truth.csv";
  std::filesystem::path states = "states.csv";
  std::filesystem::path checkpoint_dir = "checkpoints";
  std::filesystem::path report_dir = "reports";

  // preprocessing and labeling
  std::int64_t period = 3600;
  std::size_t w = 24;
  int min_s = 2;
  int restarts = 10;
  int max_s = 5;

  // window geometry
  std::size_t lookback = 336;
  std::vector<std::size_t> horizons{1, 6, 12, 24, 36, 48, 60, 72, 168, 336};

  // optimization
  double lr = 0.001;
  std::size_t batch = 128;
  int patience = 10;
  int max_epochs = 100;
  int msp_max_epochs = 0;  // 0 = same as max_epochs
  std::uint64_t seed = 0;

  // guidance
  double alpha = 1.0;
  guidance::WeightMode weight_mode = guidance::WeightMode::probability_max;
  std::string mode = "erkg";  // train/eval: plain or erkg

  // architectures
  forecaster::ForecasterKind forecaster = forecaster::ForecasterKind::linear;
  std::size_t hidden = 256;
  bool per_variable = true;
  std::size_t trunk_channels = 32;
  std::size_t ue_channels = 16;
  std::size_t kernel_width = 3;

  // synth
  std::size_t length = 20000;
  double noise_sigma = 0.15;
  double spike_rate = 0.01;
  bool household_total = true;
  /// appliance.<name>.levels / .dwell / .trigger entries; empty = built-in household
  std::vector<synth::ApplianceSpec> appliances;

  /// Applies one key=value setting; throws ConfigError on unknown keys or bad values.
  void set(const std::string& key, const std::string& value);
  void validate() const;

  /// Every key with its effective value, one "key = value" per line, sorted by key.
  std::string echo() const;

  TrainOptions train_options(std::uint64_t stream_seed) const;
  TrainOptions msp_train_options(std::uint64_t stream_seed) const;
  labeling::LabelingConfig labeling_config() const;
  guidance::GuidanceConfig guidance_config() const;
  synth::SynthConfig synth_config() const;
};

/// Reads a flat "key = value" file ('#' starts a comment) into `config`.
void load_config_file(const std::filesystem::path& path, RunConfig& config);

/// File first, then overrides in order, so flags win.
RunConfig resolve_config(const std::filesystem::path* file, const std::vector<std::pair<std::string, std::string>>& overrides);

}  // namespace loadguide::app
