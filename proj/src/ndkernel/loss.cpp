#include "loadguide/ndkernel/loss.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "loadguide/errors.hpp"

namespace loadguide::nd {

void softmax_inplace(std::span<double> values) {
  if (values.empty()) return;
  const double peak = *std::max_element(values.begin(), values.end());
  double total = 0.0;
  for (double& v : values) {
    v = std::exp(v - peak);
    total += v;
  }
  for (double& v : values) v /= total;
}

Matrix softmax_rows(const Matrix& logits) {
  Matrix p = logits;
  for (std::size_t r = 0; r < p.rows(); ++r) softmax_inplace(p.row(r));
  return p;
}

LossAndGrad cross_entropy(const Matrix& probabilities, std::span<const int> target_class) {
  const std::size_t n = probabilities.rows(), k = probabilities.cols();
  if (target_class.size() != n) {
    throw DimensionError("cross_entropy: " + std::to_string(target_class.size()) + " targets for " +
                         std::to_string(n) + " rows");
  }
  LossAndGrad out{0.0, probabilities};
  if (n == 0) return out;
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t r = 0; r < n; ++r) {
    const int t = target_class[r];
    if (t < 0 || static_cast<std::size_t>(t) >= k) {
      throw DimensionError("cross_entropy: target " + std::to_string(t) + " out of range [0, " +
                           std::to_string(k) + ") at row " + std::to_string(r));
    }
    out.loss -= std::log(probabilities(r, static_cast<std::size_t>(t)));
    out.grad(r, static_cast<std::size_t>(t)) -= 1.0;
  }
  out.loss *= inv_n;
  for (double& g : out.grad.data()) g *= inv_n;
  return out;
}

}  // namespace loadguide::nd
