#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "loadguide/ndkernel/layers.hpp"

namespace loadguide::nd {

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::size_t worst_index = 0;
  std::size_t checked = 0;
  bool passed = false;
};

using ScalarFunction = std::function<double(std::span<const double>)>;

/// Compares `analytic` against central differences of `f` at `point` with step h.
/// Relative error per coordinate is |a - n| / max(|a|, |n|, floor).
GradCheckReport grad_check(const ScalarFunction& f, std::span<const double> point,
                           std::span<const double> analytic, double tolerance, double h = 1e-5,
                           double floor = 1e-4);

/// Concatenates weights then bias of each layer, in order.
std::vector<double> flatten_params(std::span<const LayerParams* const> layers);
void assign_params(std::span<LayerParams* const> layers, std::span<const double> flat);
std::vector<double> flatten_grads(std::span<const LayerGrads> grads);

}  // namespace loadguide::nd
