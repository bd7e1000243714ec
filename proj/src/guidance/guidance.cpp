#include "loadguide/guidance/guidance.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "loadguide/errors.hpp"

namespace loadguide::guidance {

namespace {

// Above this many cached weight entries the teacher is re-run per sample instead.
constexpr std::size_t kMaxCachedWeights = std::size_t{1} << 25;

}  // namespace

std::string to_string(WeightMode mode) { return mode == WeightMode::probability_max ? "probability" : "logit"; }

WeightMode weight_mode_from_string(const std::string& s) {
  if (s == "probability") return WeightMode::probability_max;
  if (s == "logit") return WeightMode::logit_max;
  throw ConfigError("unknown weight mode '" + s + "' (expected probability or logit)");
}

void GuidanceConfig::validate() const {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw ConfigError("guidance alpha must be a finite value >= 0");
}

EventWeights event_weights(const msp::GroupedLogits& logits, WeightMode mode) {
  const nd::Matrix scores = mode == WeightMode::probability_max ? msp::group_probabilities(logits) : logits.z();
  EventWeights out{nd::Matrix(logits.steps(), logits.groups())};
  for (std::size_t tau = 0; tau < logits.steps(); ++tau)
    for (std::size_t i = 0; i < logits.groups(); ++i) {
      const auto g = scores.row(tau).subspan(logits.offset(i), static_cast<std::size_t>(logits.counts()[i]));
      out.w(tau, i) = *std::max_element(g.begin(), g.end());
    }
  return out;
}

nd::LossAndGrad guided_loss(const nd::Matrix& prediction, const nd::Matrix& target, const EventWeights& weights,
                            double alpha) {
  if (prediction.rows() != target.rows() || prediction.cols() != target.cols() ||
      weights.w.rows() != target.rows() || weights.w.cols() != target.cols()) {
    throw DimensionError("guided_loss shape mismatch: prediction " + prediction.shape_string() + ", target " +
                         target.shape_string() + ", weights " + weights.w.shape_string());
  }
  if (!(alpha >= 0.0)) throw ConfigError("guided_loss alpha must be >= 0");

  const double scale = 1.0 / static_cast<double>(prediction.size());
  const auto& p = prediction.data();
  const auto& y = target.data();
  const auto& w = weights.w.data();
  double mae = 0.0, response = 0.0;
  nd::LossAndGrad out{0.0, nd::Matrix(prediction.rows(), prediction.cols())};
  auto& g = out.grad.data();
  for (std::size_t j = 0; j < p.size(); ++j) {
    const double e = p[j] - y[j];
    const double a = std::abs(e);
    mae += a;
    response += w[j] * a;
    const double sign = e > 0.0 ? scale : (e < 0.0 ? -scale : 0.0);
    g[j] = sign + alpha * (w[j] * sign);
  }
  out.loss = mae * scale + alpha * (response * scale);
  return out;
}

forecaster::ForecasterTrainResult train_guided(forecaster::ForecasterModel model, const msp::MspModel& teacher,
                                               const data::WindowSet& train, const data::WindowSet& val,
                                               const GuidanceConfig& config, const TrainOptions& options) {
  config.validate();
  const auto& f = model.config;
  const auto& t = teacher.config;
  if (f.lookback != t.lookback || f.horizon != t.horizon || f.variables != t.variables) {
    throw ConfigError("teacher and forecaster window geometry differ");
  }
  if (train.lookback() != f.lookback || train.horizon() != f.horizon || train.variables() != f.variables ||
      val.lookback() != f.lookback || val.horizon() != f.horizon || val.variables() != f.variables) {
    throw DimensionError("guided training windows do not match the forecaster configuration");
  }
  if (val.size() == 0) throw DataError("validation set is empty");

  // The teacher is frozen, so weights per training window can be computed once.
  std::vector<EventWeights> cached;
  if (train.size() * f.horizon * f.variables <= kMaxCachedWeights) {
    cached.reserve(train.size());
    for (std::size_t k = 0; k < train.size(); ++k)
      cached.push_back(event_weights(msp::msp_forward(teacher, train.input(k)), config.mode));
  }

  forecaster::ForecastCache cache;
  SampleObjective<forecaster::ForecasterModel> objective = [&](const forecaster::ForecasterModel& m, std::size_t k,
                                                               std::vector<nd::LayerGrads>& acc) {
    const nd::Matrix window = train.input(k);
    std::optional<EventWeights> fresh;
    if (cached.empty()) fresh = event_weights(msp::msp_forward(teacher, window), config.mode);
    const EventWeights& w = cached.empty() ? *fresh : cached[k];
    const nd::Matrix pred = forecaster::forecast(m, window, &cache);
    const auto loss = guided_loss(pred, train.target(k), w, config.alpha);
    forecaster::forecast_backward_accumulate(m, cache, loss.grad, acc);
    return loss.loss;
  };
  ValidationLoss<forecaster::ForecasterModel> validation = [&](const forecaster::ForecasterModel& m) {
    return forecaster::mean_mae(m, val);
  };
  ValidationLoss<forecaster::ForecasterModel> train_eval = [&](const forecaster::ForecasterModel& m) {
    double total = 0.0;
    for (std::size_t k = 0; k < train.size(); ++k) {
      const nd::Matrix window = train.input(k);
      const EventWeights w =
          cached.empty() ? event_weights(msp::msp_forward(teacher, window), config.mode) : cached[k];
      total += guided_loss(forecaster::forecast(m, window), train.target(k), w, config.alpha).loss;
    }
    return total / static_cast<double>(train.size());
  };

  forecaster::ForecasterTrainResult result{std::move(model), {}};
  result.history = fit_early_stopping(result.model, train.size(), options, objective, validation, train_eval);
  return result;
}

}  // namespace loadguide::guidance
