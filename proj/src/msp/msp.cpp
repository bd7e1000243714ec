#include "loadguide/msp/msp.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "loadguide/errors.hpp"
#include "loadguide/ndkernel/random.hpp"

namespace loadguide::msp {

std::size_t MspConfig::total_states() const {
  std::size_t total = 0;
  for (int n : state_counts) total += static_cast<std::size_t>(n);
  return total;
}

void MspConfig::validate() const {
  if (lookback < 1 || horizon < 1 || variables < 1) throw ConfigError("MSP lookback, horizon and variables must be >= 1");
  if (trunk_channels < 1 || ue_channels < 1 || kernel_width < 1) throw ConfigError("MSP channel counts and kernel width must be >= 1");
  if (state_counts.size() != variables) {
    throw ConfigError("MSP has " + std::to_string(state_counts.size()) + " state counts for " +
                      std::to_string(variables) + " variables");
  }
  for (std::size_t i = 0; i < state_counts.size(); ++i) {
    if (state_counts[i] < 2 || state_counts[i] > 5) {
      throw ConfigError("MSP state count N[" + std::to_string(i) + "] = " + std::to_string(state_counts[i]) +
                        " outside [2, 5]");
    }
  }
  if (kernel_width > 2 * lookback + 1) throw ConfigError("MSP kernel width exceeds 2*L+1");
}

std::vector<nd::LayerParams*> MspModel::layers() {
  std::vector<nd::LayerParams*> out{&trunk};
  for (auto& e : extractors) {
    out.push_back(&e.conv);
    out.push_back(&e.head);
  }
  out.push_back(&fusion);
  return out;
}

std::vector<const nd::LayerParams*> MspModel::layers() const {
  std::vector<const nd::LayerParams*> out{&trunk};
  for (const auto& e : extractors) {
    out.push_back(&e.conv);
    out.push_back(&e.head);
  }
  out.push_back(&fusion);
  return out;
}

MspModel make_msp(const MspConfig& config) {
  config.validate();
  std::mt19937_64 rng(nd::derive_seed(config.seed, 0x6d7370));
  MspModel m;
  m.config = config;
  m.trunk = nd::make_conv1d("trunk", config.variables, config.trunk_channels, config.kernel_width, rng);
  for (std::size_t i = 0; i < config.variables; ++i) {
    Extractor e;
    e.conv = nd::make_conv1d("extractor" + std::to_string(i) + ".conv", config.trunk_channels, config.ue_channels,
                             config.kernel_width, rng);
    e.head = nd::make_linear("extractor" + std::to_string(i) + ".head", config.ue_channels * config.lookback,
                             config.horizon * static_cast<std::size_t>(config.state_counts[i]), rng);
    m.extractors.push_back(std::move(e));
  }
  m.fusion = nd::make_linear("fusion", config.total_states(), config.total_states(), rng);
  return m;
}

GroupedLogits::GroupedLogits(nd::Matrix z, std::vector<int> counts) : z_(std::move(z)), counts_(std::move(counts)) {
  std::size_t offset = 0;
  for (int n : counts_) {
    if (n < 1) throw DimensionError("group width must be >= 1");
    offsets_.push_back(offset);
    offset += static_cast<std::size_t>(n);
  }
  if (offset != z_.cols()) {
    throw DimensionError("grouped logits: widths sum to " + std::to_string(offset) + " but Z is " + z_.shape_string());
  }
}

std::span<const double> GroupedLogits::group(std::size_t step, std::size_t variable) const {
  return z_.row(step).subspan(offsets_[variable], static_cast<std::size_t>(counts_[variable]));
}

GroupedLogits msp_forward(const MspModel& model, const nd::Matrix& window, MspActivations* cache) {
  const auto& cfg = model.config;
  if (window.rows() != cfg.lookback || window.cols() != cfg.variables) {
    throw DimensionError("MSP expects a " + std::to_string(cfg.lookback) + "x" + std::to_string(cfg.variables) +
                         " window, got " + window.shape_string());
  }
  MspActivations local;
  MspActivations& act = cache ? *cache : local;
  act.input = window.transposed();
  act.trunk = nd::relu(nd::conv1d_forward(model.trunk, act.input));
  act.features.resize(cfg.variables);
  act.fused_input = nd::Matrix(cfg.horizon, cfg.total_states());
  std::size_t offset = 0;
  for (std::size_t i = 0; i < cfg.variables; ++i) {
    const auto& e = model.extractors[i];
    nd::Matrix feat = nd::relu(nd::conv1d_forward(e.conv, act.trunk));
    const std::size_t width = feat.size();
    act.features[i] = nd::Matrix(1, width, std::move(feat.data()));
    const nd::Matrix head = nd::linear_forward(e.head, act.features[i]);
    const auto n = static_cast<std::size_t>(cfg.state_counts[i]);
    for (std::size_t tau = 0; tau < cfg.horizon; ++tau)
      for (std::size_t c = 0; c < n; ++c) act.fused_input(tau, offset + c) = head(0, tau * n + c);
    offset += n;
  }
  return GroupedLogits(nd::linear_forward(model.fusion, act.fused_input), cfg.state_counts);
}

void msp_backward_accumulate(const MspModel& model, const MspActivations& cache, const nd::Matrix& grad_logits,
                             std::vector<nd::LayerGrads>& acc) {
  const auto& cfg = model.config;
  const std::size_t last = acc.size() - 1;
  nd::Matrix d_fused;
  nd::layer_backward_accumulate(model.fusion, cache.fused_input, grad_logits, acc[last], &d_fused);

  nd::Matrix d_trunk(cfg.trunk_channels, cfg.lookback);
  std::size_t offset = 0;
  for (std::size_t i = 0; i < cfg.variables; ++i) {
    const auto& e = model.extractors[i];
    const auto n = static_cast<std::size_t>(cfg.state_counts[i]);
    nd::Matrix d_head(1, cfg.horizon * n);
    for (std::size_t tau = 0; tau < cfg.horizon; ++tau)
      for (std::size_t c = 0; c < n; ++c) d_head(0, tau * n + c) = d_fused(tau, offset + c);
    offset += n;

    nd::Matrix d_feat;
    nd::layer_backward_accumulate(e.head, cache.features[i], d_head, acc[2 + 2 * i], &d_feat);
    nd::relu_backward_inplace(cache.features[i], d_feat);
    const nd::Matrix d_map(cfg.ue_channels, cfg.lookback, std::move(d_feat.data()));
    nd::Matrix d_in;
    nd::layer_backward_accumulate(e.conv, cache.trunk, d_map, acc[1 + 2 * i], &d_in);
    auto& dt = d_trunk.data();
    const auto& di = d_in.data();
    for (std::size_t j = 0; j < dt.size(); ++j) dt[j] += di[j];
  }
  nd::relu_backward_inplace(cache.trunk, d_trunk);
  nd::layer_backward_accumulate(model.trunk, cache.input, d_trunk, acc[0], nullptr);
}

nd::Matrix group_probabilities(const GroupedLogits& logits) {
  nd::Matrix p = logits.z();
  for (std::size_t tau = 0; tau < logits.steps(); ++tau)
    for (std::size_t i = 0; i < logits.groups(); ++i)
      nd::softmax_inplace(p.row(tau).subspan(logits.offset(i), static_cast<std::size_t>(logits.counts()[i])));
  return p;
}

std::vector<int> decode_states(const GroupedLogits& logits) {
  std::vector<int> states(logits.steps() * logits.groups());
  for (std::size_t tau = 0; tau < logits.steps(); ++tau)
    for (std::size_t i = 0; i < logits.groups(); ++i) {
      const auto g = logits.group(tau, i);
      states[tau * logits.groups() + i] = static_cast<int>(std::max_element(g.begin(), g.end()) - g.begin());
    }
  return states;
}

nd::LossAndGrad msp_loss(const GroupedLogits& logits, std::span<const int> targets) {
  const std::size_t h = logits.steps(), d = logits.groups();
  if (targets.size() != h * d) {
    throw DimensionError("msp_loss: " + std::to_string(targets.size()) + " targets for " + std::to_string(h) + "x" +
                         std::to_string(d) + " states");
  }
  nd::LossAndGrad out{0.0, group_probabilities(logits)};
  const double scale = 1.0 / static_cast<double>(h * d);
  for (std::size_t tau = 0; tau < h; ++tau)
    for (std::size_t i = 0; i < d; ++i) {
      const int s = targets[tau * d + i];
      const int n = logits.counts()[i];
      if (s < 0 || s >= n) {
        throw DimensionError("msp_loss: target " + std::to_string(s) + " at (step " + std::to_string(tau) +
                             ", variable " + std::to_string(i) + ") outside [0, " + std::to_string(n) + ")");
      }
      const auto g = logits.group(tau, i);
      const double peak = *std::max_element(g.begin(), g.end());
      double total = 0.0;
      for (double z : g) total += std::exp(z - peak);
      out.loss += peak + std::log(total) - g[static_cast<std::size_t>(s)];
      out.grad(tau, logits.offset(i) + static_cast<std::size_t>(s)) -= 1.0;
    }
  out.loss *= scale;
  for (double& v : out.grad.data()) v *= scale;
  return out;
}

}  // namespace loadguide::msp
