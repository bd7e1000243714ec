#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "loadguide/data/preprocess.hpp"
#include "loadguide/data/windows.hpp"
#include "loadguide/metrics/metrics.hpp"
#include "loadguide/ndkernel/layers.hpp"
#include "loadguide/ndkernel/loss.hpp"
#include "loadguide/training.hpp"

namespace loadguide::msp {
struct MspModel;
}

namespace loadguide::guidance {
struct GuidanceConfig;
}

namespace loadguide::forecaster {

enum class ForecasterKind { linear, mlp };

std::string to_string(ForecasterKind kind);
ForecasterKind forecaster_kind_from_string(const std::string& s);

struct ForecasterConfig {
  ForecasterKind kind = ForecasterKind::linear;
  std::size_t lookback = 0;
  std::size_t horizon = 0;
  std::size_t variables = 0;
  std::size_t hidden = 256;   // mlp only
  bool per_variable = true;   // linear only: an independent L -> H map per variable
  std::uint64_t seed = 0;

  void validate() const;
  friend bool operator==(const ForecasterConfig&, const ForecasterConfig&) = default;
};

/// Maps an L x D window to an H x D forecast.
///   linear, per_variable: D linear blocks L -> H, one per column
///   linear, joint:        one linear block (L*D) -> (H*D) on the flattened window
///   mlp:                  (L*D) -> hidden, ReLU, hidden -> (H*D)
struct ForecasterModel {
  ForecasterConfig config;
  std::vector<nd::LayerParams> blocks;

  std::vector<nd::LayerParams*> layers();
  std::vector<const nd::LayerParams*> layers() const;
};

ForecasterModel make_forecaster(const ForecasterConfig& config);

struct ForecastCache {
  std::vector<nd::Matrix> inputs;  // per block input row vectors
  nd::Matrix hidden;               // mlp post-ReLU activation
};

nd::Matrix forecast(const ForecasterModel& model, const nd::Matrix& window, ForecastCache* cache = nullptr);
void forecast_backward_accumulate(const ForecasterModel& model, const ForecastCache& cache, const nd::Matrix& grad_output,
                                  std::vector<nd::LayerGrads>& acc);

/// Element-mean absolute error with subgradient sign(e) / (H*D), 0 at ties.
nd::LossAndGrad mae_loss(const nd::Matrix& prediction, const nd::Matrix& target);

struct ForecasterTrainResult {
  ForecasterModel model;
  TrainHistory history;
};

double mean_mae(const ForecasterModel& model, const data::WindowSet& windows);

/// Adam on plain MAE with early stopping on validation MAE.
ForecasterTrainResult train_plain(ForecasterModel model, const data::WindowSet& train, const data::WindowSet& val,
                                  const TrainOptions& options);

/// Knowledge-guided training against a frozen MSP; the forecaster's structure
/// and inference path are unchanged. Throws ConfigError when the MSP's window
/// geometry differs from the forecaster's.
ForecasterTrainResult train_with_erkg(ForecasterModel model, const msp::MspModel& teacher, const data::WindowSet& train,
                                      const data::WindowSet& val, const guidance::GuidanceConfig& guidance,
                                      const TrainOptions& options);

/// MAE and MAPE' over all windows on the normalized scale; when `stats` is
/// given, also on the original scale.
metrics::HorizonMetrics evaluate(const ForecasterModel& model, const data::WindowSet& windows,
                                 const data::NormStats* stats = nullptr);

}  // namespace loadguide::forecaster
