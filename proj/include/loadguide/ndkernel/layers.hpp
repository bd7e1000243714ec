#pragma once

#include <cstddef>
#include <random>
#include <string>
#include <vector>

#include "loadguide/ndkernel/matrix.hpp"

namespace loadguide::nd {

enum class LayerKind { linear, conv1d };

std::string to_string(LayerKind kind);
LayerKind layer_kind_from_string(const std::string& s);

struct Conv1dShape {
  std::size_t kernel_width = 0;
  std::size_t in_channels = 0;
  std::size_t out_channels = 0;
};

// Linear: weights are in x out, forward is input * W + bias (per row).
// Conv1d: weights are out x (in * kernel_width), stride 1, same-length output
// through symmetric zero padding of (kernel_width - 1) / 2 on the left.
struct LayerParams {
  std::string name;
  LayerKind kind = LayerKind::linear;
  Matrix weights;
  std::vector<double> bias;
  Conv1dShape conv;

  std::size_t parameter_count() const { return weights.size() + bias.size(); }
};

struct LayerGrads {
  Matrix weights;
  std::vector<double> bias;

  static LayerGrads zeros_like(const LayerParams& p);
  void add(const LayerGrads& other);
  void scale(double factor);
};

struct BackwardResult {
  LayerGrads params;
  Matrix input;
};

/// Glorot-uniform weights in +-sqrt(6 / (fan_in + fan_out)), zero bias.
LayerParams make_linear(std::string name, std::size_t in, std::size_t out, std::mt19937_64& rng);
LayerParams make_conv1d(std::string name, std::size_t in_channels, std::size_t out_channels,
                        std::size_t kernel_width, std::mt19937_64& rng);

Matrix linear_forward(const LayerParams& params, const Matrix& input);
/// `input` is channels x time.
Matrix conv1d_forward(const LayerParams& params, const Matrix& input);
Matrix layer_forward(const LayerParams& params, const Matrix& input);

/// Adds parameter gradients into `acc`; writes the input gradient when `input_grad` is non-null.
void layer_backward_accumulate(const LayerParams& params, const Matrix& input, const Matrix& upstream,
                               LayerGrads& acc, Matrix* input_grad);
BackwardResult layer_backward(const LayerParams& params, const Matrix& input, const Matrix& upstream);

Matrix relu(const Matrix& x);
/// Masks `upstream` by (activation > 0); `activation` may be pre- or post-ReLU values.
void relu_backward_inplace(const Matrix& activation, Matrix& upstream);

}  // namespace loadguide::nd
