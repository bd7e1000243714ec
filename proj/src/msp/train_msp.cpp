#include <algorithm>
#include <string>

#include "loadguide/errors.hpp"
#include "loadguide/msp/msp.hpp"

namespace loadguide::msp {

namespace {

void check_windows(const MspModel& model, const data::WindowSet& windows, const std::string& what) {
  const auto& cfg = model.config;
  if (windows.lookback() != cfg.lookback || windows.horizon() != cfg.horizon || windows.variables() != cfg.variables) {
    throw DimensionError(what + " windows (L=" + std::to_string(windows.lookback()) + ", H=" +
                         std::to_string(windows.horizon()) + ", D=" + std::to_string(windows.variables()) +
                         ") do not match the MSP configuration");
  }
  if (!windows.has_states()) throw DataError(what + " windows carry no state labels");
  if (windows.state_counts() != cfg.state_counts) throw DimensionError(what + " state counts differ from the MSP's N");
}

}  // namespace

double msp_mean_loss(const MspModel& model, const data::WindowSet& windows) {
  check_windows(model, windows, "evaluation");
  if (windows.size() == 0) throw DataError("no evaluation windows");
  double total = 0.0;
  for (std::size_t k = 0; k < windows.size(); ++k) {
    const auto logits = msp_forward(model, windows.input(k));
    total += msp_loss(logits, windows.state_target(k)).loss;
  }
  return total / static_cast<double>(windows.size());
}

double state_accuracy(const MspModel& model, const data::WindowSet& windows) {
  check_windows(model, windows, "evaluation");
  std::size_t hits = 0, total = 0;
  for (std::size_t k = 0; k < windows.size(); ++k) {
    const auto predicted = decode_states(msp_forward(model, windows.input(k)));
    const auto truth = windows.state_target(k);
    for (std::size_t j = 0; j < truth.size(); ++j) hits += predicted[j] == truth[j] ? 1 : 0;
    total += truth.size();
  }
  return total == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(total);
}

double majority_class_accuracy(const data::WindowSet& reference, const data::WindowSet& windows) {
  const std::size_t d = reference.variables();
  const auto& counts = reference.state_counts();
  std::vector<std::vector<std::size_t>> freq(d);
  for (std::size_t i = 0; i < d; ++i) freq[i].assign(static_cast<std::size_t>(counts[i]), 0);
  for (std::size_t k = 0; k < reference.size(); ++k) {
    const auto s = reference.state_target(k);
    for (std::size_t j = 0; j < s.size(); ++j) ++freq[j % d][static_cast<std::size_t>(s[j])];
  }
  std::vector<int> majority(d);
  for (std::size_t i = 0; i < d; ++i)
    majority[i] = static_cast<int>(std::max_element(freq[i].begin(), freq[i].end()) - freq[i].begin());

  std::size_t hits = 0, total = 0;
  for (std::size_t k = 0; k < windows.size(); ++k) {
    const auto s = windows.state_target(k);
    for (std::size_t j = 0; j < s.size(); ++j) hits += s[j] == majority[j % d] ? 1 : 0;
    total += s.size();
  }
  return total == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(total);
}

MspTrainResult train_msp(MspModel model, const data::WindowSet& train, const data::WindowSet& val,
                         const TrainOptions& options) {
  check_windows(model, train, "training");
  check_windows(model, val, "validation");
  if (val.size() == 0) throw DataError("validation set is empty");

  MspActivations cache;
  SampleObjective<MspModel> objective = [&](const MspModel& m, std::size_t k, std::vector<nd::LayerGrads>& acc) {
    const auto logits = msp_forward(m, train.input(k), &cache);
    const auto loss = msp_loss(logits, train.state_target(k));
    msp_backward_accumulate(m, cache, loss.grad, acc);
    return loss.loss;
  };
  ValidationLoss<MspModel> validation = [&](const MspModel& m) { return msp_mean_loss(m, val); };

  MspTrainResult result{std::move(model), {}};
  ValidationLoss<MspModel> train_eval = [&](const MspModel& m) { return msp_mean_loss(m, train); };
  result.history = fit_early_stopping(result.model, train.size(), options, objective, validation, train_eval);
  return result;
}

}  // namespace loadguide::msp
