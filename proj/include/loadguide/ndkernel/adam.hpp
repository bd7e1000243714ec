#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "loadguide/ndkernel/layers.hpp"

namespace loadguide::nd {

struct AdamConfig {
  double lr = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Moment estimates shaped like the layers they were created for.
struct AdamState {
  AdamConfig config;
  std::uint64_t step = 0;
  std::vector<LayerGrads> first;
  std::vector<LayerGrads> second;

  static AdamState for_layers(std::span<const LayerParams* const> layers, AdamConfig config = {});
};

/// One bias-corrected Adam update. Throws NumericError naming the offending
/// layer block when a gradient is non-finite; parameters are untouched then.
void adam_step(AdamState& state, std::span<LayerParams* const> params, std::span<const LayerGrads> grads);

}  // namespace loadguide::nd
