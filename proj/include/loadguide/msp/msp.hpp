#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "loadguide/data/windows.hpp"
#include "loadguide/ndkernel/layers.hpp"
#include "loadguide/ndkernel/loss.hpp"
#include "loadguide/training.hpp"

namespace loadguide::msp {

struct MspConfig {
  std::size_t lookback = 0;
  std::size_t horizon = 0;
  std::size_t variables = 0;
  std::vector<int> state_counts;
  std::size_t trunk_channels = 32;
  std::size_t ue_channels = 16;
  std::size_t kernel_width = 3;
  std::uint64_t seed = 0;

  std::size_t total_states() const;
  void validate() const;

  friend bool operator==(const MspConfig&, const MspConfig&) = default;
};

/// One univariate extractor: conv1d + ReLU, then a linear head over the
/// flattened (channels x time) map producing H x N[i] logits.
struct Extractor {
  nd::LayerParams conv;
  nd::LayerParams head;
};

/// Multivariate state predictor: shared conv trunk, one extractor per
/// variable, and a per-step linear fusion over the concatenated groups.
struct MspModel {
  MspConfig config;
  nd::LayerParams trunk;
  std::vector<Extractor> extractors;
  nd::LayerParams fusion;

  /// trunk, conv_0, head_0, ..., conv_{D-1}, head_{D-1}, fusion
  std::vector<nd::LayerParams*> layers();
  std::vector<const nd::LayerParams*> layers() const;
};

MspModel make_msp(const MspConfig& config);

/// H x sum(N) logits split into D consecutive groups of width N[i].
class GroupedLogits {
 public:
  GroupedLogits(nd::Matrix z, std::vector<int> counts);

  const nd::Matrix& z() const { return z_; }
  nd::Matrix& z() { return z_; }
  const std::vector<int>& counts() const { return counts_; }
  std::size_t offset(std::size_t variable) const { return offsets_[variable]; }
  std::size_t steps() const { return z_.rows(); }
  std::size_t groups() const { return counts_.size(); }
  std::span<const double> group(std::size_t step, std::size_t variable) const;

 private:
  nd::Matrix z_;
  std::vector<int> counts_;
  std::vector<std::size_t> offsets_;
};

/// Intermediate values kept for the backward pass.
struct MspActivations {
  nd::Matrix input;                  // D x L
  nd::Matrix trunk;                  // C_t x L after ReLU
  std::vector<nd::Matrix> features;  // per variable, 1 x (C_u * L) after ReLU
  nd::Matrix fused_input;            // H x sum(N)
};

GroupedLogits msp_forward(const MspModel& model, const nd::Matrix& window, MspActivations* cache = nullptr);

/// Adds d loss / d params into `acc` given d loss / d Z.
void msp_backward_accumulate(const MspModel& model, const MspActivations& cache, const nd::Matrix& grad_logits,
                             std::vector<nd::LayerGrads>& acc);

/// Per-group softmax probabilities, same layout as Z.
nd::Matrix group_probabilities(const GroupedLogits& logits);

/// H x D row-major argmax states; ties resolve to the lowest class.
std::vector<int> decode_states(const GroupedLogits& logits);

/// Mean over steps and variables of the per-group cross-entropy, with
/// gradient w.r.t. Z. `targets` is H x D row-major.
nd::LossAndGrad msp_loss(const GroupedLogits& logits, std::span<const int> targets);

struct MspTrainResult {
  MspModel model;
  TrainHistory history;
};

MspTrainResult train_msp(MspModel model, const data::WindowSet& train, const data::WindowSet& val,
                         const TrainOptions& options);

double msp_mean_loss(const MspModel& model, const data::WindowSet& windows);
/// Fraction of (sample, step, variable) states decoded correctly.
double state_accuracy(const MspModel& model, const data::WindowSet& windows);
/// Same metric for the predictor that always outputs each variable's most
/// frequent state in `reference`.
double majority_class_accuracy(const data::WindowSet& reference, const data::WindowSet& windows);

}  // namespace loadguide::msp
