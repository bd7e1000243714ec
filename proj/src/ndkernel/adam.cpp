#include "loadguide/ndkernel/adam.hpp"

#include <cmath>
#include <string>

#include "loadguide/errors.hpp"

namespace loadguide::nd {

AdamState AdamState::for_layers(std::span<const LayerParams* const> layers, AdamConfig config) {
  AdamState s;
  s.config = config;
  for (const LayerParams* p : layers) {
    s.first.push_back(LayerGrads::zeros_like(*p));
    s.second.push_back(LayerGrads::zeros_like(*p));
  }
  return s;
}

namespace {

void update_block(std::span<double> w, std::span<const double> g, std::span<double> m, std::span<double> v,
                  const AdamConfig& c, double correction1, double correction2) {
  for (std::size_t i = 0; i < w.size(); ++i) {
    m[i] = c.beta1 * m[i] + (1.0 - c.beta1) * g[i];
    v[i] = c.beta2 * v[i] + (1.0 - c.beta2) * g[i] * g[i];
    const double m_hat = m[i] / correction1;
    const double v_hat = v[i] / correction2;
    w[i] -= c.lr * m_hat / (std::sqrt(v_hat) + c.epsilon);
  }
}

}  // namespace

void adam_step(AdamState& state, std::span<LayerParams* const> params, std::span<const LayerGrads> grads) {
  if (params.size() != grads.size() || params.size() != state.first.size()) {
    throw DimensionError("adam_step: " + std::to_string(params.size()) + " layers, " +
                         std::to_string(grads.size()) + " gradients, state for " +
                         std::to_string(state.first.size()));
  }
  for (std::size_t l = 0; l < params.size(); ++l) {
    const LayerParams& p = *params[l];
    if (grads[l].weights.rows() != p.weights.rows() || grads[l].weights.cols() != p.weights.cols() ||
        grads[l].bias.size() != p.bias.size()) {
      throw DimensionError("adam_step: gradient shape mismatch for layer '" + p.name + "'");
    }
    require_finite(grads[l].weights, "adam_step gradient of '" + p.name + ".weights'");
    require_finite(grads[l].bias, "adam_step gradient of '" + p.name + ".bias'");
  }

  ++state.step;
  const auto t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(state.config.beta1, t);
  const double correction2 = 1.0 - std::pow(state.config.beta2, t);
  for (std::size_t l = 0; l < params.size(); ++l) {
    LayerParams& p = *params[l];
    update_block(p.weights.data(), grads[l].weights.data(), state.first[l].weights.data(),
                 state.second[l].weights.data(), state.config, correction1, correction2);
    update_block(p.bias, grads[l].bias, state.first[l].bias, state.second[l].bias, state.config, correction1,
                 correction2);
  }
}

}  // namespace loadguide::nd
