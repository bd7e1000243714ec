#include <string>

#include "loadguide/errors.hpp"
#include "loadguide/forecaster/forecaster.hpp"
#include "loadguide/guidance/guidance.hpp"
#include "loadguide/msp/msp.hpp"

namespace loadguide::forecaster {

namespace {

void check_windows(const ForecasterModel& model, const data::WindowSet& windows, const std::string& what) {
  const auto& cfg = model.config;
  if (windows.lookback() != cfg.lookback || windows.horizon() != cfg.horizon || windows.variables() != cfg.variables) {
    throw DimensionError(what + " windows (L=" + std::to_string(windows.lookback()) + ", H=" +
                         std::to_string(windows.horizon()) + ", D=" + std::to_string(windows.variables()) +
                         ") do not match the forecaster configuration");
  }
}

}  // namespace

ForecasterTrainResult train_plain(ForecasterModel model, const data::WindowSet& train, const data::WindowSet& val,
                                  const TrainOptions& options) {
  check_windows(model, train, "training");
  check_windows(model, val, "validation");
  if (val.size() == 0) throw DataError("validation set is empty");

  ForecastCache cache;
  SampleObjective<ForecasterModel> objective = [&](const ForecasterModel& m, std::size_t k,
                                                   std::vector<nd::LayerGrads>& acc) {
    const nd::Matrix pred = forecast(m, train.input(k), &cache);
    const auto loss = mae_loss(pred, train.target(k));
    forecast_backward_accumulate(m, cache, loss.grad, acc);
    return loss.loss;
  };
  ValidationLoss<ForecasterModel> validation = [&](const ForecasterModel& m) { return mean_mae(m, val); };
  ValidationLoss<ForecasterModel> train_eval = [&](const ForecasterModel& m) { return mean_mae(m, train); };

  ForecasterTrainResult result{std::move(model), {}};
  result.history = fit_early_stopping(result.model, train.size(), options, objective, validation, train_eval);
  return result;
}

ForecasterTrainResult train_with_erkg(ForecasterModel model, const msp::MspModel& teacher, const data::WindowSet& train,
                                      const data::WindowSet& val, const guidance::GuidanceConfig& guidance,
                                      const TrainOptions& options) {
  const auto& f = model.config;
  const auto& t = teacher.config;
  if (f.lookback != t.lookback || f.horizon != t.horizon || f.variables != t.variables) {
    throw ConfigError("MSP geometry (L=" + std::to_string(t.lookback) + ", H=" + std::to_string(t.horizon) +
                      ", D=" + std::to_string(t.variables) + ") differs from the forecaster (L=" +
                      std::to_string(f.lookback) + ", H=" + std::to_string(f.horizon) + ", D=" +
                      std::to_string(f.variables) + ")");
  }
  return guidance::train_guided(std::move(model), teacher, train, val, guidance, options);
}

}  // namespace loadguide::forecaster
