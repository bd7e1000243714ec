#include "loadguide/forecaster/forecaster.hpp"

#include <random>

#include "loadguide/errors.hpp"
#include "loadguide/ndkernel/random.hpp"

namespace loadguide::forecaster {

std::string to_string(ForecasterKind kind) { return kind == ForecasterKind::linear ? "linear" : "mlp"; }

ForecasterKind forecaster_kind_from_string(const std::string& s) {
  if (s == "linear") return ForecasterKind::linear;
  if (s == "mlp") return ForecasterKind::mlp;
  throw ConfigError("unknown forecaster kind '" + s + "' (expected linear or mlp)");
}

void ForecasterConfig::validate() const {
  if (lookback < 1 || horizon < 1 || variables < 1) throw ConfigError("forecaster L, H and D must be >= 1");
  if (kind == ForecasterKind::mlp && hidden < 1) throw ConfigError("mlp hidden width must be >= 1");
}

std::vector<nd::LayerParams*> ForecasterModel::layers() {
  std::vector<nd::LayerParams*> out;
  for (auto& b : blocks) out.push_back(&b);
  return out;
}

std::vector<const nd::LayerParams*> ForecasterModel::layers() const {
  std::vector<const nd::LayerParams*> out;
  for (const auto& b : blocks) out.push_back(&b);
  return out;
}

ForecasterModel make_forecaster(const ForecasterConfig& config) {
  config.validate();
  std::mt19937_64 rng(nd::derive_seed(config.seed, 0x666f7265));
  ForecasterModel m;
  m.config = config;
  const std::size_t l = config.lookback, h = config.horizon, d = config.variables;
  if (config.kind == ForecasterKind::linear) {
    if (config.per_variable) {
      for (std::size_t i = 0; i < d; ++i) m.blocks.push_back(nd::make_linear("linear" + std::to_string(i), l, h, rng));
    } else {
      m.blocks.push_back(nd::make_linear("linear", l * d, h * d, rng));
    }
  } else {
    m.blocks.push_back(nd::make_linear("mlp.hidden", l * d, config.hidden, rng));
    m.blocks.push_back(nd::make_linear("mlp.output", config.hidden, h * d, rng));
  }
  return m;
}

nd::Matrix forecast(const ForecasterModel& model, const nd::Matrix& window, ForecastCache* cache) {
  const auto& cfg = model.config;
  if (window.rows() != cfg.lookback || window.cols() != cfg.variables) {
    throw DimensionError("forecaster expects a " + std::to_string(cfg.lookback) + "x" + std::to_string(cfg.variables) +
                         " window, got " + window.shape_string());
  }
  ForecastCache local;
  ForecastCache& c = cache ? *cache : local;
  const std::size_t l = cfg.lookback, h = cfg.horizon, d = cfg.variables;
  nd::Matrix out(h, d);

  if (cfg.kind == ForecasterKind::linear && cfg.per_variable) {
    c.inputs.resize(d);
    for (std::size_t i = 0; i < d; ++i) {
      nd::Matrix x(1, l);
      for (std::size_t t = 0; t < l; ++t) x(0, t) = window(t, i);
      const nd::Matrix y = nd::linear_forward(model.blocks[i], x);
      for (std::size_t tau = 0; tau < h; ++tau) out(tau, i) = y(0, tau);
      c.inputs[i] = std::move(x);
    }
    return out;
  }

  c.inputs.resize(model.blocks.size());
  c.inputs[0] = nd::Matrix(1, l * d, window.data());
  nd::Matrix y;
  if (cfg.kind == ForecasterKind::linear) {
    y = nd::linear_forward(model.blocks[0], c.inputs[0]);
  } else {
    c.hidden = nd::relu(nd::linear_forward(model.blocks[0], c.inputs[0]));
    c.inputs[1] = c.hidden;
    y = nd::linear_forward(model.blocks[1], c.hidden);
  }
  return nd::Matrix(h, d, std::move(y.data()));
}

void forecast_backward_accumulate(const ForecasterModel& model, const ForecastCache& cache, const nd::Matrix& grad_output,
                                  std::vector<nd::LayerGrads>& acc) {
  const auto& cfg = model.config;
  const std::size_t h = cfg.horizon, d = cfg.variables;
  if (grad_output.rows() != h || grad_output.cols() != d) {
    throw DimensionError("forecaster upstream gradient " + grad_output.shape_string() + " does not match H x D");
  }
  if (cfg.kind == ForecasterKind::linear && cfg.per_variable) {
    for (std::size_t i = 0; i < d; ++i) {
      nd::Matrix g(1, h);
      for (std::size_t tau = 0; tau < h; ++tau) g(0, tau) = grad_output(tau, i);
      nd::layer_backward_accumulate(model.blocks[i], cache.inputs[i], g, acc[i], nullptr);
    }
    return;
  }
  const nd::Matrix g(1, h * d, grad_output.data());
  if (cfg.kind == ForecasterKind::linear) {
    nd::layer_backward_accumulate(model.blocks[0], cache.inputs[0], g, acc[0], nullptr);
    return;
  }
  nd::Matrix d_hidden;
  nd::layer_backward_accumulate(model.blocks[1], cache.hidden, g, acc[1], &d_hidden);
  nd::relu_backward_inplace(cache.hidden, d_hidden);
  nd::layer_backward_accumulate(model.blocks[0], cache.inputs[0], d_hidden, acc[0], nullptr);
}

nd::LossAndGrad mae_loss(const nd::Matrix& prediction, const nd::Matrix& target) {
  if (prediction.rows() != target.rows() || prediction.cols() != target.cols()) {
    throw DimensionError("mae_loss shape mismatch: " + prediction.shape_string() + " vs " + target.shape_string());
  }
  nd::LossAndGrad out{0.0, nd::Matrix(prediction.rows(), prediction.cols())};
  const double scale = 1.0 / static_cast<double>(prediction.size());
  const auto& p = prediction.data();
  const auto& y = target.data();
  auto& g = out.grad.data();
  for (std::size_t j = 0; j < p.size(); ++j) {
    const double e = p[j] - y[j];
    out.loss += std::abs(e);
    g[j] = e > 0.0 ? scale : (e < 0.0 ? -scale : 0.0);
  }
  out.loss *= scale;
  return out;
}

double mean_mae(const ForecasterModel& model, const data::WindowSet& windows) {
  if (windows.size() == 0) throw DataError("no evaluation windows");
  metrics::ErrorSums sums;
  for (std::size_t k = 0; k < windows.size(); ++k) sums.add(forecast(model, windows.input(k)), windows.target(k));
  return sums.mae();
}

metrics::HorizonMetrics evaluate(const ForecasterModel& model, const data::WindowSet& windows,
                                 const data::NormStats* stats) {
  if (windows.size() == 0) throw DataError("no evaluation windows");
  metrics::ErrorSums normalized, raw;
  const std::size_t d = model.config.variables;
  for (std::size_t k = 0; k < windows.size(); ++k) {
    nd::Matrix pred = forecast(model, windows.input(k));
    nd::Matrix truth = windows.target(k);
    normalized.add(pred, truth);
    if (stats) {
      for (std::size_t tau = 0; tau < pred.rows(); ++tau)
        for (std::size_t i = 0; i < d; ++i) {
          pred(tau, i) = pred(tau, i) * stats->effective_std(i) + stats->mean[i];
          truth(tau, i) = truth(tau, i) * stats->effective_std(i) + stats->mean[i];
        }
      raw.add(pred, truth);
    }
  }
  metrics::HorizonMetrics m;
  m.horizon = windows.horizon();
  m.mae = normalized.mae();
  m.mape = normalized.mape_sym();
  if (stats) {
    m.mae_raw = raw.mae();
    m.mape_raw = raw.mape_sym();
  }
  return m;
}

}  // namespace loadguide::forecaster
