#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "loadguide/ndkernel/matrix.hpp"

namespace loadguide::nd {

/// Row-wise softmax, stabilized by subtracting each row's max.
Matrix softmax_rows(const Matrix& logits);

/// In-place softmax over one contiguous slice.
void softmax_inplace(std::span<double> values);

struct LossAndGrad {
  double loss = 0.0;
  Matrix grad;
};

/// Mean over rows of -log p[target]; `grad` is d loss / d logits = (p - onehot) / rows,
/// i.e. the gradient through the softmax that produced `probabilities`.
LossAndGrad cross_entropy(const Matrix& probabilities, std::span<const int> target_class);

}  // namespace loadguide::nd
