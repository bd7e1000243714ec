#pragma once

#include <string>

#include "loadguide/data/windows.hpp"
#include "loadguide/forecaster/forecaster.hpp"
#include "loadguide/msp/msp.hpp"
#include "loadguide/ndkernel/loss.hpp"
#include "loadguide/training.hpp"

namespace loadguide::guidance {

/// How a group of class scores becomes one weight.
enum class WeightMode {
  probability_max,  // max of the per-group softmax, in [1/N, 1]
  logit_max,        // max of the raw logits (ablation; unbounded)
};

std::string to_string(WeightMode mode);
WeightMode weight_mode_from_string(const std::string& s);

struct GuidanceConfig {
  double alpha = 1.0;
  WeightMode mode = WeightMode::probability_max;

  void validate() const;
};

/// H x D per-(step, variable) weights derived from teacher logits.
struct EventWeights {
  nd::Matrix w;
};

EventWeights event_weights(const msp::GroupedLogits& logits, WeightMode mode = WeightMode::probability_max);

/// L = L_MAE + alpha * L_PR with
///   L_MAE = mean |yhat - y|
///   L_PR  = (1/D) sum_i (1/H) sum_tau W[tau][i] |yhat - y|
/// and the subgradient w.r.t. yhat (0 at exact ties).
nd::LossAndGrad guided_loss(const nd::Matrix& prediction, const nd::Matrix& target, const EventWeights& weights,
                            double alpha);

/// Trains the forecaster on guided_loss with weights from the frozen teacher,
/// evaluated on the same input window. Model selection uses plain validation MAE.
forecaster::ForecasterTrainResult train_guided(forecaster::ForecasterModel model, const msp::MspModel& teacher,
                                               const data::WindowSet& train, const data::WindowSet& val,
                                               const GuidanceConfig& config, const TrainOptions& options);

}  // namespace loadguide::guidance
