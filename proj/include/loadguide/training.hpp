#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include "loadguide/errors.hpp"
#include "loadguide/ndkernel/adam.hpp"
#include "loadguide/ndkernel/layers.hpp"

namespace loadguide {

struct TrainOptions {
  double lr = 0.001;
  std::size_t batch_size = 128;
  int patience = 10;
  int max_epochs = 100;
  std::uint64_t seed = 0;
};

struct TrainHistory {
  double initial_train_loss = 0.0;
  std::vector<double> train_loss;  // mean per-sample loss seen during each epoch
  std::vector<double> val_loss;    // after each epoch
  int best_epoch = 0;              // 1-based; 0 when no epoch ran
  int stopped_epoch = 0;

  double best_val_loss() const {
    return val_loss.empty() ? std::numeric_limits<double>::infinity() : val_loss[static_cast<std::size_t>(best_epoch - 1)];
  }
};

/// Per-sample objective: returns the loss of training sample k and adds its
/// gradient into `acc` (one LayerGrads per layer, in layer order).
template <class Model>
using SampleObjective = std::function<double(const Model&, std::size_t, std::vector<nd::LayerGrads>&)>;

template <class Model>
using ValidationLoss = std::function<double(const Model&)>;

/// Mini-batch Adam with shuffled epochs and early stopping on validation
/// loss. The model is replaced by the best-validation snapshot on return.
/// Batch gradients are the mean of per-sample gradients, summed in sample order.
/// `train_loss` evaluates the full training set once, before the first update.
template <class Model>
TrainHistory fit_early_stopping(Model& model, std::size_t train_size, const TrainOptions& opt,
                                const SampleObjective<Model>& objective, const ValidationLoss<Model>& validation,
                                const ValidationLoss<Model>& train_loss) {
  if (train_size == 0) throw DataError("training set is empty");
  if (opt.batch_size == 0) throw ConfigError("batch size must be >= 1");
  if (opt.patience < 1) throw ConfigError("patience must be >= 1");
  if (opt.max_epochs < 1) throw ConfigError("max_epochs must be >= 1");
  if (!(opt.lr >= 0.0)) throw ConfigError("learning rate must be >= 0");

  auto layers = model.layers();
  std::vector<const nd::LayerParams*> const_layers(layers.begin(), layers.end());
  nd::AdamState adam = nd::AdamState::for_layers(const_layers, nd::AdamConfig{opt.lr});

  std::vector<nd::LayerGrads> acc;
  auto reset_acc = [&] {
    acc.clear();
    for (const auto* p : const_layers) acc.push_back(nd::LayerGrads::zeros_like(*p));
  };

  TrainHistory history;
  history.initial_train_loss = train_loss(model);

  std::mt19937_64 rng(opt.seed);
  std::vector<std::size_t> order(train_size);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Model best = model;
  double best_val = std::numeric_limits<double>::infinity();
  int since_best = 0;

  for (int epoch = 1; epoch <= opt.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < train_size; start += opt.batch_size) {
      const std::size_t stop = std::min(train_size, start + opt.batch_size);
      reset_acc();
      for (std::size_t b = start; b < stop; ++b) epoch_loss += objective(model, order[b], acc);
      const double inv = 1.0 / static_cast<double>(stop - start);
      for (auto& g : acc) g.scale(inv);
      nd::adam_step(adam, layers, acc);
    }
    history.train_loss.push_back(epoch_loss / static_cast<double>(train_size));
    const double val = validation(model);
    if (!std::isfinite(val)) throw NumericError("validation loss is not finite at epoch " + std::to_string(epoch));
    history.val_loss.push_back(val);
    history.stopped_epoch = epoch;
    if (val < best_val) {
      best_val = val;
      best = model;
      history.best_epoch = epoch;
      since_best = 0;
    } else if (++since_best >= opt.patience) {
      break;
    }
  }
  model = std::move(best);
  return history;
}

}  // namespace loadguide
