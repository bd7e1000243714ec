#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "loadguide/data/series_frame.hpp"
#include "loadguide/data/state_profile.hpp"

namespace loadguide::synth {

/// When `source` enters `source_state`, this appliance is forced into
/// `target_state` exactly `lag` steps later with the given probability.
struct Trigger {
  std::string source;
  int source_state = 1;
  std::size_t lag = 1;
  double probability = 1.0;
  int target_state = 1;
};

/// Multi-state appliance: cycles 0 -> 1 -> ... -> n-1 -> 0 with geometric
/// dwell times. A dwell mean of 0 makes that state absorbing (left only
/// through a trigger).
struct ApplianceSpec {
  std::string name;
  std::vector<double> levels;
  std::vector<double> dwell_means;
  std::optional<Trigger> trigger;
};

struct SynthConfig {
  std::vector<ApplianceSpec> appliances;
  std::size_t length = 0;
  double noise_sigma = 0.0;
  double spike_rate = 0.0;  // per step and appliance; spike size uniform in [2 sigma, 6 sigma]
  bool include_household_total = false;
  std::uint64_t seed = 0;
  std::int64_t start_timestamp = 1577836800;
  std::int64_t step_seconds = 3600;

  /// Throws ConfigError; a trigger cycle is reported as "a -> b -> a".
  void validate() const;
};

struct SynthOutput {
  /// Appliance columns in config order, then "total" when requested.
  data::SeriesFrame frame;
  /// Ground-truth states of the appliance columns only.
  data::StateProfile states;
};

SynthOutput generate(const SynthConfig& config);

/// Eight-appliance household with cross-appliance triggers
/// (washer -> dryer, oven -> dishwasher, ...).
SynthConfig benchmark_household(std::size_t length, double noise_sigma, double spike_rate, std::uint64_t seed,
                                bool include_household_total = true);

}  // namespace loadguide::synth
